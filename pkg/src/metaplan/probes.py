"""Teleportation probes: how much does a plan change when the agent is
displaced mid-trajectory?

Events displace a greedy agent from the n-th state of an optimal
trajectory to a random open cell. The headline quantity is the KL
divergence between the state-action joints (plan policy times its own
discounted occupancy) of the post- and pre-teleport partial plans.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .maze import GridMaze, MazeError, optimal_plan_length
from .mdp import Policy, TabularMdp, discounted_occupancy, greedy_path
from .metaplanner import MetaPlanResult
from .softplan import log_softmax

__all__ = [
    "TeleportEvent",
    "simulate_teleport_events",
    "partial_plan_divergence",
    "teleport_distance",
]


@dataclass(frozen=True)
class TeleportEvent:
    maze_id: str
    pre_state: tuple[int, int]
    post_state: tuple[int, int]
    step_index: int
    seed: int


def simulate_teleport_events(maze: GridMaze, count: int, seed: int,
                             maze_id: str = "maze",
                             mdp: TabularMdp | None = None,
                             q_star: np.ndarray | None = None) -> list[TeleportEvent]:
    """Sample ``count`` teleport events on one maze, deterministically.

    For each event: draw a step index n uniformly from [1, optimal path
    length], walk a fresh greedy optimal trajectory (random tie-breaks),
    take its n-th state as the pre-teleport state, and land uniformly on
    an open non-goal cell. Pass a precomputed ``mdp``/``q_star`` pair to
    skip re-solving the maze.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    cells = maze.open_cells()
    candidates = [c for c in cells if c != maze.goal]
    if set(candidates) <= {maze.start}:
        raise MazeError("maze has no open non-goal cells besides the start")
    if mdp is None or q_star is None:
        from .maze import maze_to_mdp
        from .mdp import value_iteration
        mdp = maze_to_mdp(maze)
        q_star = value_iteration(mdp).q
    length = optimal_plan_length(maze)
    start_id = int(maze.state_ids()[maze.start])
    rng = np.random.default_rng(seed)
    events = []
    for _ in range(count):
        n = int(rng.integers(1, length + 1))
        traj = greedy_path(mdp, q_star, start_id,
                           seed=int(rng.integers(0, 2**63 - 1)))
        pre = cells[traj.states[n - 1]]
        post = candidates[int(rng.integers(len(candidates)))]
        events.append(TeleportEvent(maze_id=maze_id, pre_state=pre,
                                    post_state=post, step_index=n, seed=seed))
    return events


def _smoothed_occupancy(mdp: TabularMdp, pi: np.ndarray, start: int,
                        smoothing: float) -> np.ndarray:
    rho = discounted_occupancy(mdp, Policy(pi), start)
    return (1.0 - smoothing) * rho + smoothing / mdp.n_states


def partial_plan_divergence(result: MetaPlanResult, mdp: TabularMdp,
                            pre_state: int, post_state: int,
                            smoothing: float = 1e-6) -> float:
    """KL divergence (nats) from the pre- to the post-teleport plan joint.

    Each plan's state-action joint is its policy weighted by its own
    discounted occupancy, rolled out from that plan's ground state;
    occupancies are mixed with uniform at ``smoothing`` so unreachable
    states stay finite. Returns D_KL[post || pre].
    """
    if not 0.0 < smoothing < 1.0:
        raise ValueError("smoothing must lie in (0, 1)")
    pre, post = int(pre_state), int(post_state)
    pi_pre = result.plans.pi[pre]
    pi_post = result.plans.pi[post]
    # log-policies straight from the softmax logits: finite even where the
    # probabilities themselves underflow to zero
    beta = result.beta_star.beta
    logpi_pre = log_softmax(beta[pre][:, None] * result.plans.q[pre])
    logpi_post = log_softmax(beta[post][:, None] * result.plans.q[post])
    rho_pre = _smoothed_occupancy(mdp, pi_pre, pre, smoothing)
    rho_post = _smoothed_occupancy(mdp, pi_post, post, smoothing)
    p_post = pi_post * rho_post[:, None]
    log_ratio = (logpi_post + np.log(rho_post)[:, None]
                 - logpi_pre - np.log(rho_pre)[:, None])
    # KL is nonnegative; identical joints can round to a tiny negative sum
    return max(float(np.sum(p_post * log_ratio)), 0.0)


def teleport_distance(pre_state, post_state) -> float:
    """Euclidean distance between two cell centers."""
    return float(np.hypot(pre_state[0] - post_state[0],
                          pre_state[1] - post_state[1]))
