"""Alternative planning-difficulty metrics to compare against plan cost.

Covers classic search effort (A* expansions under a Manhattan heuristic),
information-theoretic bounded rationality (single-resource free-energy
recursion), softmax and soft-Bellman policy entropies, value-iteration
sweep counts, and trajectory turn counts.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .maze import GridMaze, UnreachableGoalError
from .mdp import BackupOperator, Policy, TabularMdp, greedy_path, value_iteration
from .softplan import log_softmax, soft_value_iteration

__all__ = [
    "AStarResult",
    "ItbrResult",
    "astar",
    "astar_node_difference",
    "itbr_values",
    "itbr_first_step_cost",
    "softmax_entropy",
    "soft_bellman_entropy",
    "vi_iterations",
    "trajectory_turns",
]


@dataclass(frozen=True)
class AStarResult:
    """Search outcome: shortest path (None if unreachable), the cells
    expanded before the goal was popped, and how many cells ever entered
    the frontier."""

    path: tuple | None
    expanded: tuple
    expanded_count: int
    inserted_count: int


def _manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def astar(maze: GridMaze, start=None, goal=None,
          heuristic: str = "manhattan") -> AStarResult:
    """A* over open cells with unit step costs.

    Ties on f are broken by smaller h, then by row-major cell order, so the
    expansion sequence is a pure function of the maze. ``heuristic="zero"``
    degrades to Dijkstra. ``expanded`` holds cells popped strictly before
    the goal; an unreachable goal yields ``path=None`` with the full
    reachable set expanded.
    """
    start = maze.start if start is None else tuple(start)
    goal = maze.goal if goal is None else tuple(goal)
    for cell in (start, goal):
        if not maze.is_open(cell):
            raise ValueError(f"cell {cell} is not open")
    if heuristic == "manhattan":
        h_fun = lambda c: _manhattan(c, goal)
    elif heuristic == "zero":
        h_fun = lambda c: 0
    else:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    if start == goal:
        return AStarResult(path=(start,), expanded=(start,),
                           expanded_count=1, inserted_count=1)

    width = maze.width
    best_g = {start: 0}
    parent = {}
    frontier = [(h_fun(start), h_fun(start), start[0] * width + start[1], 0, start)]
    closed = set()
    expanded = []
    inserted = {start}
    path = None
    while frontier:
        _, _, _, g, cell = heapq.heappop(frontier)
        if cell in closed:
            continue
        if cell == goal:
            node, path = cell, [cell]
            while node in parent:
                node = parent[node]
                path.append(node)
            path = tuple(reversed(path))
            break
        closed.add(cell)
        expanded.append(cell)
        for nb in maze.neighbors(cell):
            g_new = g + 1
            if g_new < best_g.get(nb, np.inf):
                best_g[nb] = g_new
                parent[nb] = cell
                h = h_fun(nb)
                heapq.heappush(frontier,
                               (g_new + h, h, nb[0] * width + nb[1], g_new, nb))
                inserted.add(nb)
    return AStarResult(path=path, expanded=tuple(expanded),
                       expanded_count=len(expanded), inserted_count=len(inserted))


def astar_node_difference(maze: GridMaze, pre_state, post_state, goal=None) -> int:
    """Extra cells the post-state search expands beyond the pre-state one:
    |expanded(post -> goal) \\ expanded(pre -> goal)|."""
    goal = maze.goal if goal is None else tuple(goal)
    pre = astar(maze, start=pre_state, goal=goal)
    post = astar(maze, start=post_state, goal=goal)
    if pre.path is None or post.path is None:
        raise UnreachableGoalError(
            f"goal {goal} unreachable from {pre_state if pre.path is None else post_state}")
    return len(set(post.expanded) - set(pre.expanded))


@dataclass(frozen=True)
class ItbrResult:
    v: np.ndarray
    q: np.ndarray
    pi: np.ndarray
    sweeps: int


def itbr_values(mdp: TabularMdp, alpha: float, tolerance: float = 1e-10,
                max_sweeps: int = 100_000,
                default_policy: Policy | None = None) -> ItbrResult:
    """Bounded-rational free-energy planning with resource parameter alpha.

    Iterates V(s) = (1/alpha) log sum_a pibar(a|s) exp{alpha Q(s,a)} with
    Q = R + gamma T V to its fixed point (log-sum-exp keeps large alpha
    finite). The induced policy is pi proportional to pibar exp{alpha Q}.
    Small alpha collapses onto the default policy; large alpha approaches
    the optimal values.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if default_policy is None:
        default_policy = Policy.uniform(mdp.n_states, mdp.n_actions)
    log_pibar = np.log(default_policy.probs)
    op = BackupOperator(mdp)
    v = np.zeros(mdp.n_states)
    for sweep in range(1, max_sweeps + 1):
        q = op.backup(v)
        v_new = logsumexp(alpha * q + log_pibar, axis=-1) / alpha
        delta = np.max(np.abs(v_new - v))
        v = v_new
        if delta < tolerance:
            break
    else:
        raise RuntimeError(f"free-energy recursion did not converge in {max_sweeps} sweeps")
    pi = np.exp(log_softmax(alpha * q + log_pibar))
    return ItbrResult(v=v, q=q, pi=pi, sweeps=sweep)


def itbr_first_step_cost(mdp: TabularMdp, alpha: float, start: int,
                         tolerance: float = 1e-10) -> float:
    """Information cost of the bounded-rational policy's first step:
    KL[pi_alpha(.|start) || pibar(.|start)] in nats."""
    default = Policy.uniform(mdp.n_states, mdp.n_actions)
    result = itbr_values(mdp, alpha, tolerance=tolerance, default_policy=default)
    row = result.pi[int(start)]
    ref = default.probs[int(start)]
    return float(np.sum(xlogy(row, row / ref)))


def softmax_entropy(q_star: np.ndarray, state: int, beta: float = 1.0) -> float:
    """Entropy (nats) of a softmax over the optimal action values at a state."""
    logp = log_softmax(beta * np.asarray(q_star, dtype=float)[int(state)])
    p = np.exp(logp)
    return float(-np.sum(p * logp))


def soft_bellman_entropy(mdp: TabularMdp, state: int, beta: float = 1.0,
                         tolerance: float = 1e-10) -> float:
    """Entropy (nats) at a state of the converged soft-Bellman policy."""
    pi, _, _, _ = soft_value_iteration(mdp, beta, tolerance=tolerance)
    row = pi[int(state)]
    return float(-np.sum(xlogy(row, row)))


def vi_iterations(mdp: TabularMdp, tolerance: float = 1e-10) -> int:
    """Sweeps value iteration needs before its update drops below tolerance."""
    return value_iteration(mdp, tolerance=tolerance).iterations


def trajectory_turns(mdp: TabularMdp, q_star: np.ndarray, start: int,
                     n_samples: int = 100, seed: int = 0) -> float:
    """Mean number of direction changes along greedy optimal trajectories.

    Greedy ties are broken uniformly at random, so the mean is taken over
    ``n_samples`` seeded rollouts. Raises if a rollout fails to reach a
    terminal state.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    child_seeds = np.random.default_rng(seed).integers(0, 2**63 - 1, size=n_samples)
    turns = np.empty(n_samples)
    for i, s in enumerate(child_seeds):
        traj = greedy_path(mdp, q_star, start, seed=int(s))
        if not mdp.terminal[traj.states[-1]]:
            raise UnreachableGoalError("greedy trajectory never reached a terminal state")
        acts = traj.actions
        turns[i] = sum(a != b for a, b in zip(acts, acts[1:]))
    return float(turns.mean())
