"""Tabular MDP representation and exact planning primitives.

States and actions are integer ids. Transition and reward tensors are dense
numpy arrays indexed ``[s, a, s']``. Terminal states are absorbing: planning
and occupancy computations zero out their outgoing rows so no value or
occupancy mass accumulates after absorption.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

ROW_SUM_TOL = 1e-12

__all__ = [
    "TabularMdp",
    "Policy",
    "Trajectory",
    "ValueIterationResult",
    "value_iteration",
    "greedy_path",
    "discounted_occupancy",
    "sample_trajectory",
]


@dataclass(frozen=True)
class TabularMdp:
    """Finite MDP: transition/reward tensors, discount, terminal flags.

    transition[s, a, s'] is the probability of landing in s' after taking a
    in s; reward[s, a, s'] is the payoff of that transition in task points.
    Rows of non-terminal states must sum to 1; terminal states are treated as
    absorbing with no further reward regardless of their stored rows.
    """

    transition: np.ndarray
    reward: np.ndarray
    discount: float
    terminal: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        r = np.asarray(self.reward, dtype=float)
        term = np.asarray(self.terminal, dtype=bool)
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "reward", r)
        object.__setattr__(self, "terminal", term)
        if t.ndim != 3 or t.shape[0] != t.shape[2]:
            raise ValueError(f"transition must be (S, A, S), got {t.shape}")
        if r.shape != t.shape:
            raise ValueError(f"reward shape {r.shape} != transition shape {t.shape}")
        if term.shape != (t.shape[0],):
            raise ValueError("terminal must be a flag per state")
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")
        if np.any(t < -ROW_SUM_TOL):
            raise ValueError("transition probabilities must be nonnegative")
        row_sums = t[~term].sum(axis=-1)
        if row_sums.size and np.max(np.abs(row_sums - 1.0)) > ROW_SUM_TOL:
            raise ValueError("non-terminal transition rows must sum to 1")

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]


@dataclass(frozen=True)
class Policy:
    """Stochastic policy: probs[s, a] = probability of action a in state s."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if p.ndim != 2:
            raise ValueError("policy must be a (S, A) matrix")
        if np.any(p < 0):
            raise ValueError("policy probabilities must be nonnegative")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ValueError("policy rows must sum to 1")

    @classmethod
    def uniform(cls, n_states: int, n_actions: int) -> "Policy":
        return cls(np.full((n_states, n_actions), 1.0 / n_actions))


@dataclass(frozen=True)
class Trajectory:
    states: tuple
    actions: tuple
    total_reward: float

    def __post_init__(self):
        if len(self.actions) != len(self.states) - 1:
            raise ValueError("trajectory needs exactly one action per step")

    def __len__(self) -> int:
        return len(self.actions)


class BackupOperator:
    """One-step Bellman backup ``v -> r_exp + discount * T v`` with terminal
    rows zeroed, shared by exact and soft planners.

    Uses a sparse matrix for the contraction when the transition tensor is
    sparse (gridworlds are), a dense matmul otherwise. ``backup`` accepts a
    value vector ``[S]`` or a batch ``[G, S]`` and returns Q-shaped arrays.
    """

    def __init__(self, mdp: TabularMdp):
        s, a = mdp.n_states, mdp.n_actions
        cont = np.where(mdp.terminal[:, None, None], 0.0, mdp.transition)
        self.t_cont = cont
        self.r_exp = np.einsum("saj,saj->sa", cont, mdp.reward)
        self.discount = mdp.discount
        self.terminal = mdp.terminal
        self.n_states = s
        self.n_actions = a
        flat = cont.reshape(s * a, s)
        if np.count_nonzero(flat) < 0.25 * flat.size:
            self._t2 = sp.csr_matrix(flat)
            self._t2_adj = sp.csr_matrix(flat.T)
        else:
            self._t2 = flat
            self._t2_adj = flat.T

    def backup(self, v: np.ndarray) -> np.ndarray:
        """r_exp + discount * E[v(s') | s, a]; batched over leading axis."""
        if v.ndim == 1:
            ev = (self._t2 @ v).reshape(self.n_states, self.n_actions)
            return self.r_exp + self.discount * ev
        g = v.shape[0]
        ev = (self._t2 @ v.T).T.reshape(g, self.n_states, self.n_actions)
        return self.r_exp[None, :, :] + self.discount * ev

    def adjoint(self, g_q: np.ndarray) -> np.ndarray:
        """Adjoint of the discounted expectation: gradients w.r.t. v."""
        if g_q.ndim == 2:
            return self.discount * (self._t2_adj @ g_q.reshape(-1))
        g = g_q.shape[0]
        flat = g_q.reshape(g, self.n_states * self.n_actions)
        return self.discount * (self._t2_adj @ flat.T).T

    def policy_kernel(self, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Markov chain ``P[s, s']`` and expected reward under a policy."""
        kernel = np.einsum("sa,saj->sj", probs, self.t_cont)
        rew = np.einsum("sa,sa->s", probs, self.r_exp)
        return kernel, rew


@dataclass(frozen=True)
class ValueIterationResult:
    v: np.ndarray
    q: np.ndarray
    iterations: int


def value_iteration(mdp: TabularMdp, tolerance: float = 1e-10,
                    max_sweeps: int = 100_000) -> ValueIterationResult:
    """Exact optimal values by synchronous value iteration.

    Sweeps until the max-norm update drops below ``tolerance``; the reported
    iteration count is the number of sweeps that still changed the values by
    at least ``tolerance`` (a myopic discount-0 problem therefore counts 1).
    Returned values satisfy v = max_a q exactly and terminal states have
    value 0.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    op = BackupOperator(mdp)
    v = np.zeros(mdp.n_states)
    iterations = 0
    for _ in range(max_sweeps):
        v_new = op.backup(v).max(axis=1)
        delta = np.max(np.abs(v_new - v))
        v = v_new
        if delta < tolerance:
            break
        iterations += 1
    else:
        raise RuntimeError(f"value iteration did not converge in {max_sweeps} sweeps")
    q = op.backup(v)
    return ValueIterationResult(v=q.max(axis=1), q=q, iterations=iterations)


def greedy_path(mdp: TabularMdp, q: np.ndarray, start: int, seed: int = 0,
                tie_tol: float = 1e-9, max_steps: int | None = None) -> Trajectory:
    """Follow argmax-Q actions from ``start`` until a terminal state.

    Ties within ``tie_tol`` of the best Q are broken uniformly at random
    under ``seed`` so repeated calls with the same seed give the same path.
    """
    rng = np.random.default_rng(seed)
    if max_steps is None:
        max_steps = 4 * mdp.n_states
    states = [int(start)]
    actions: list[int] = []
    total = 0.0
    s = int(start)
    for _ in range(max_steps):
        if mdp.terminal[s]:
            break
        row = q[s]
        best = row.max()
        candidates = np.flatnonzero(row >= best - tie_tol)
        a = int(rng.choice(candidates))
        s_next = int(rng.choice(mdp.n_states, p=mdp.transition[s, a]))
        total += mdp.reward[s, a, s_next]
        actions.append(a)
        states.append(s_next)
        s = s_next
    else:
        if not mdp.terminal[s]:
            raise RuntimeError(f"greedy path did not reach a terminal state in {max_steps} steps")
    return Trajectory(states=tuple(states), actions=tuple(actions), total_reward=total)


def discounted_occupancy(mdp: TabularMdp, policy: Policy, start: int) -> np.ndarray:
    """Normalized discounted state occupancy of a policy from ``start``.

    rho(s) is proportional to sum_t discount^t Pr{s_t = s}; mass stops
    accumulating once a terminal state is entered (the terminal state keeps
    the weight of its first visit only). The result sums to 1.
    """
    op = BackupOperator(mdp)
    kernel, _ = op.policy_kernel(policy.probs)
    n = mdp.n_states
    e0 = np.zeros(n)
    e0[start] = 1.0
    # u = e0 + discount * P^T u, with terminal rows of P zeroed
    u = np.linalg.solve(np.eye(n) - mdp.discount * kernel.T, e0)
    return u / u.sum()


def sample_trajectory(mdp: TabularMdp, policy: Policy, start: int, seed: int = 0,
                      max_steps: int = 1000) -> Trajectory:
    """Sample a trajectory under the policy; stops at a terminal state or
    after ``max_steps`` actions."""
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    rng = np.random.default_rng(seed)
    states = [int(start)]
    actions: list[int] = []
    total = 0.0
    s = int(start)
    for _ in range(max_steps):
        if mdp.terminal[s]:
            break
        a = int(rng.choice(mdp.n_actions, p=policy.probs[s]))
        s_next = int(rng.choice(mdp.n_states, p=mdp.transition[s, a]))
        total += mdp.reward[s, a, s_next]
        actions.append(a)
        states.append(s_next)
        s = s_next
    return Trajectory(states=tuple(states), actions=tuple(actions), total_reward=total)
