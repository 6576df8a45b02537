"""Soft-Bellman partial planning.

A partial plan from a ground state is the policy over "simulated" states
produced by iterating softmax-weighted Bellman backups, where the softmax
sharpness at each simulated state is set by a per-state inverse temperature.
Temperature 0 leaves the plan at the uniform default (zero information
cost); large temperatures recover greedy planning. The simulated state space
is the ground state space, so temperature fields are square arrays indexed
``[ground_state, simulated_state]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mdp import BackupOperator, Policy, TabularMdp

__all__ = [
    "TemperatureField",
    "PartialPlan",
    "PlanSlice",
    "softplus",
    "inv_softplus",
    "soft_bellman_rollout",
    "plan_all_states",
    "plan_cost",
    "soft_value_iteration",
]


def softplus(x: np.ndarray) -> np.ndarray:
    """log(1 + exp(x)), overflow-safe; maps raw parameters to temperatures."""
    return np.logaddexp(0.0, x)


def inv_softplus(y) -> np.ndarray:
    """Inverse of :func:`softplus` on [0, inf); 0 maps to -inf."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("temperatures must be nonnegative")
    with np.errstate(divide="ignore"):
        small = np.log(np.expm1(np.minimum(y, 30.0)))
    return np.where(y > 30.0, y, small)


def log_softmax(z: np.ndarray) -> np.ndarray:
    """Row-stable log-softmax over the last axis (shift invariant)."""
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


@dataclass(frozen=True)
class TemperatureField:
    """Per-(ground, simulated) state inverse temperatures.

    Stored as unconstrained ``raw`` parameters; the actual temperatures are
    ``softplus(raw)``, which keeps them nonnegative with smooth gradients.
    """

    raw: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.raw, dtype=float)
        object.__setattr__(self, "raw", r)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("raw parameters must be square: one row per ground state, "
                             "one column per simulated state")
        if np.any(np.isposinf(r)) or np.any(np.isnan(r)):
            raise ValueError("temperatures must be finite")

    @property
    def beta(self) -> np.ndarray:
        return softplus(self.raw)

    @property
    def n_states(self) -> int:
        return self.raw.shape[0]

    @classmethod
    def from_beta(cls, beta: np.ndarray) -> "TemperatureField":
        return cls(inv_softplus(beta))

    @classmethod
    def constant(cls, n_states: int, value: float) -> "TemperatureField":
        return cls.from_beta(np.full((n_states, n_states), float(value)))


@dataclass(frozen=True)
class PlanSlice:
    """Partial plan from one ground state: policy, action values, values."""

    ground_state: int
    pi: np.ndarray
    q: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class PartialPlan:
    """Partial plans from every ground state.

    ``pi[s, t, a]`` is the planned probability of action ``a`` at simulated
    state ``t`` when planning from ground state ``s``; ``kl[s, t]`` its
    information cost against the default policy in nats, and
    ``total_cost[s]`` the sum over simulated states.
    """

    pi: np.ndarray
    q: np.ndarray
    v: np.ndarray
    kl: np.ndarray
    total_cost: np.ndarray

    def slice(self, ground_state: int) -> PlanSlice:
        s = int(ground_state)
        return PlanSlice(ground_state=s, pi=self.pi[s], q=self.q[s], v=self.v[s])

    def acted_policy(self) -> np.ndarray:
        """pi(a | s; s): the action distribution actually used at each state."""
        idx = np.arange(self.pi.shape[0])
        return self.pi[idx, idx, :]


def soft_sweeps(op: BackupOperator, beta: np.ndarray, horizon: int,
                record: list | None = None):
    """Run ``horizon`` soft-Bellman backups from Q = 0.

    ``beta`` has shape [G, S] (one temperature row per ground state). Each
    sweep computes the softmax policy at the current Q, its expected value,
    and backs the value up through the transition kernel. Returns the
    policy, action values, and values after the final sweep. When ``record``
    is given, (q_t, pi_t) pairs are appended for every sweep, final included.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    g = beta.shape[0]
    q = np.zeros((g, op.n_states, op.n_actions))
    for _ in range(horizon):
        logpi = log_softmax(beta[:, :, None] * q)
        pi = np.exp(logpi)
        if record is not None:
            record.append((q, pi))
        v = np.einsum("gta,gta->gt", pi, q)
        q = op.backup(v)
    logpi = log_softmax(beta[:, :, None] * q)
    pi = np.exp(logpi)
    if record is not None:
        record.append((q, pi))
    v = np.einsum("gta,gta->gt", pi, q)
    return pi, q, v


def soft_bellman_rollout(mdp: TabularMdp, temps: TemperatureField,
                         ground_state: int, horizon: int) -> PlanSlice:
    """Partial plan from one ground state after ``horizon`` soft backups."""
    if temps.n_states != mdp.n_states:
        raise ValueError("temperature field does not match the MDP's state count")
    op = BackupOperator(mdp)
    beta = temps.beta[int(ground_state)][None, :]
    pi, q, v = soft_sweeps(op, beta, horizon)
    return PlanSlice(ground_state=int(ground_state), pi=pi[0], q=q[0], v=v[0])


def plan_cost(plan, default_policy: Policy,
              terminal: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """KL divergence of a plan from the default policy, per simulated state.

    ``plan`` is a :class:`PlanSlice` or an array of policy rows ``[..., S, A]``.
    Returns (kl_per_state, total) in nats. Terminal simulated states are
    treated as no-ops and contribute zero.
    """
    pi = plan.pi if isinstance(plan, PlanSlice) else np.asarray(plan)
    pibar = default_policy.probs
    if np.any((pibar <= 0.0) & (pi > 0.0)):
        raise ValueError("default policy must have full support wherever the plan does")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = pi * (np.log(np.where(pi > 0, pi, 1.0)) - np.log(pibar))
    kl = np.where(pi > 0, terms, 0.0).sum(axis=-1)
    if terminal is not None:
        kl = np.where(terminal, 0.0, kl)
    return kl, kl.sum(axis=-1)


def plan_all_states(mdp: TabularMdp, temps: TemperatureField, horizon: int,
                    default_policy: Policy | None = None) -> PartialPlan:
    """Partial plans from every ground state, with their information costs."""
    if temps.n_states != mdp.n_states:
        raise ValueError("temperature field does not match the MDP's state count")
    if default_policy is None:
        default_policy = Policy.uniform(mdp.n_states, mdp.n_actions)
    op = BackupOperator(mdp)
    pi, q, v = soft_sweeps(op, temps.beta, horizon)
    kl, total = plan_cost(pi, default_policy, terminal=mdp.terminal)
    total = np.where(mdp.terminal, 0.0, total)
    return PartialPlan(pi=pi, q=q, v=v, kl=kl, total_cost=total)


def soft_value_iteration(mdp: TabularMdp, beta: float | np.ndarray,
                         tolerance: float = 1e-10, max_sweeps: int = 100_000):
    """Soft-Bellman backups with a fixed temperature, run to convergence.

    Unlike :func:`soft_bellman_rollout` this iterates until the values stop
    changing (sup norm below ``tolerance``) rather than for a fixed horizon.
    Returns (pi, q, v, sweeps).
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    op = BackupOperator(mdp)
    b = np.broadcast_to(np.asarray(beta, dtype=float), (mdp.n_states,))[None, :, None]
    v = np.zeros((1, mdp.n_states))
    for sweep in range(1, max_sweeps + 1):
        q = op.backup(v)
        pi = np.exp(log_softmax(b * q))
        v_new = np.einsum("gta,gta->gt", pi, q)
        delta = np.max(np.abs(v_new - v))
        v = v_new
        if delta < tolerance:
            break
    else:
        raise RuntimeError(f"soft value iteration did not converge in {max_sweeps} sweeps")
    return pi[0], q[0], v[0], sweep
