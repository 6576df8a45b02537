"""Gradient-based temperature allocation: planning the plan itself.

Given an MDP and a planning-cost weight, find per-(ground, simulated) state
inverse temperatures whose partial plans maximize task value minus the
weighted information cost of planning. The objective for one temperature
field is

    V(s) = sum_a pi(a|s; s) sum_s' T(s'|s,a) [R + gamma V(s')] - lambda c(s)

where pi is the soft-Bellman partial plan induced by the temperatures and
c(s) its total KL cost against the default policy. V is a linear fixed
point in the acted policies, solved directly; the loss -sum_s V(s) is
minimized by Adam on the raw (pre-softplus) temperature parameters.

Gradients are exact: reverse-mode differentiation through the unrolled
soft-Bellman sweeps, combined with the adjoint of the linear evaluation
system (solving A^T u = dL/dV instead of unrolling policy evaluation).
All reductions run in fixed state order, so results are reproducible
bit-for-bit for a given seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from .mdp import BackupOperator, Policy, TabularMdp
from .softplan import (PartialPlan, TemperatureField, log_softmax,
                       plan_all_states, softplus, soft_sweeps)

__all__ = [
    "MetaPlanConfig",
    "MetaPlanResult",
    "ParetoPoint",
    "evaluate_meta_value",
    "meta_loss_and_gradient",
    "optimize",
    "pareto_sweep",
]


@dataclass(frozen=True, eq=False)
class MetaPlanConfig:
    """Settings for one temperature-allocation run.

    ``cost_weight`` is the price of a nat of planning. ``state_weights``
    optionally reweights the per-state loss terms (default: all states
    count equally).
    """

    cost_weight: float
    outer_iterations: int = 200
    horizon: int = 100
    step_size: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    eval_tolerance: float = 1e-10
    init_low: float = -2.0
    init_high: float = 0.0
    state_weights: np.ndarray | None = None

    def __post_init__(self):
        if not np.isfinite(self.cost_weight) or self.cost_weight < 0:
            raise ValueError("cost_weight must be finite and nonnegative")
        if self.outer_iterations < 1:
            raise ValueError("outer_iterations must be at least 1")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.eval_tolerance <= 0:
            raise ValueError("eval_tolerance must be positive")
        if self.init_low > self.init_high:
            raise ValueError("init_low must not exceed init_high")
        if self.state_weights is not None:
            w = np.asarray(self.state_weights, dtype=float)
            if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("state_weights must be a 1-d nonnegative array")
            object.__setattr__(self, "state_weights", w)

    def to_dict(self) -> dict:
        d = {
            "cost_weight": self.cost_weight,
            "outer_iterations": self.outer_iterations,
            "horizon": self.horizon,
            "step_size": self.step_size,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "eval_tolerance": self.eval_tolerance,
            "init_low": self.init_low,
            "init_high": self.init_high,
        }
        if self.state_weights is not None:
            d["state_weights"] = [float(x) for x in self.state_weights]
        return d


@dataclass(frozen=True)
class MetaPlanResult:
    """Optimized temperatures plus everything derived from them."""

    beta_star: TemperatureField
    plans: PartialPlan
    costs: np.ndarray
    v_lambda: np.ndarray
    loss_history: np.ndarray
    wall_time: float
    config: MetaPlanConfig


@dataclass(frozen=True)
class ParetoPoint:
    cost_weight: float
    planning_cost: float
    value: float


def _as_probs(acted_policies) -> np.ndarray:
    probs = acted_policies.probs if isinstance(acted_policies, Policy) \
        else np.asarray(acted_policies, dtype=float)
    if np.any(probs < 0) or not np.allclose(probs.sum(axis=-1), 1.0, atol=1e-9):
        raise ValueError("acted policies must be distributions over actions")
    return probs


def evaluate_meta_value(mdp: TabularMdp, acted_policies, costs: np.ndarray,
                        cost_weight: float, method: str = "direct",
                        tolerance: float = 1e-10) -> np.ndarray:
    """Value of following the acted policies while paying for planning.

    Solves V(s) = sum_a pi(a|s) sum_s' T [R + gamma V(s')] - lambda c(s).
    ``method="direct"`` solves the linear system exactly; ``"iterative"``
    runs policy evaluation to ``tolerance`` (kept as a cross-check on the
    direct route). Costs are charged as given — terminal states end up at
    V = -lambda c(terminal), so pass zero cost there for the usual
    absorbing-state convention.
    """
    probs = _as_probs(acted_policies)
    c = np.asarray(costs, dtype=float)
    if c.shape != (mdp.n_states,) or not np.all(np.isfinite(c)):
        raise ValueError("costs must be one finite value per state")
    op = BackupOperator(mdp)
    kernel, rbar = op.policy_kernel(probs)
    b = rbar - cost_weight * c
    if method == "direct":
        a_mat = np.eye(mdp.n_states) - mdp.discount * kernel
        return np.linalg.solve(a_mat, b)
    if method == "iterative":
        v = np.zeros(mdp.n_states)
        for _ in range(10_000_000):
            v_new = b + mdp.discount * (kernel @ v)
            if np.max(np.abs(v_new - v)) < tolerance:
                return v_new
            v = v_new
        raise RuntimeError("policy evaluation did not converge")
    raise ValueError(f"unknown method {method!r}")


def _forward(op: BackupOperator, raw: np.ndarray, horizon: int,
             cost_weight: float, weights: np.ndarray,
             default_log_probs: np.ndarray, want_tape: bool):
    """One full loss evaluation; returns intermediates for the backward pass."""
    n = op.n_states
    beta = softplus(raw)
    tape = [] if want_tape else None
    pi, q, _ = soft_sweeps(op, beta, horizon, record=tape)
    logpi = log_softmax(beta[:, :, None] * q)
    # information cost of each plan against the default policy, nats
    kl = np.einsum("gta,gta->gt", pi, logpi - default_log_probs[None, :, :])
    kl[:, op.terminal] = 0.0
    cost = kl.sum(axis=1)
    cost[op.terminal] = 0.0
    idx = np.arange(n)
    acted = pi[idx, idx, :]
    kernel, rbar = op.policy_kernel(acted)
    a_mat = np.eye(n) - op.discount * kernel
    v = np.linalg.solve(a_mat, rbar - cost_weight * cost)
    loss = -float(weights @ v)
    return loss, {
        "beta": beta, "tape": tape, "pi": pi, "q": q, "logpi": logpi,
        "kl": kl, "cost": cost, "acted": acted, "a_mat": a_mat, "v": v,
    }


def _backward(op: BackupOperator, raw: np.ndarray, fw: dict,
              cost_weight: float, weights: np.ndarray,
              default_log_probs: np.ndarray) -> np.ndarray:
    """Exact gradient of the forward loss with respect to raw parameters."""
    beta, tape = fw["beta"], fw["tape"]
    n = op.n_states
    idx = np.arange(n)

    # adjoint of the linear evaluation solve: A v = b, so dL/db = A^-T dL/dv
    u = np.linalg.solve(fw["a_mat"].T, -weights)
    g_cost = -cost_weight * u
    g_cost[op.terminal] = 0.0
    # b depends on the acted policies through both rbar and the kernel;
    # collecting terms gives dL/dacted[s,a] = u[s] * (R + gamma T v)[s,a]
    g_acted = u[:, None] * op.backup(fw["v"])

    g_kl = np.broadcast_to(g_cost[:, None], fw["kl"].shape).copy()
    g_kl[:, op.terminal] = 0.0
    g_pi = g_kl[:, :, None] * (fw["logpi"] - default_log_probs[None, :, :] + 1.0)
    g_pi[idx, idx, :] += g_acted

    # softmax at the final sweep: z = beta * q, pi = softmax(z)
    q_h, pi_h = tape[-1]
    gz = pi_h * (g_pi - np.sum(pi_h * g_pi, axis=-1, keepdims=True))
    g_beta = np.einsum("gta,gta->gt", gz, q_h)
    g_q = gz * beta[:, :, None]

    # walk the recorded sweeps in reverse: q_{t+1} = R + gamma T (pi_t . q_t)
    for q_t, pi_t in reversed(tape[:-1]):
        g_v = op.adjoint(g_q)
        g_pi_t = g_v[:, :, None] * q_t
        gz = pi_t * (g_pi_t - np.sum(pi_t * g_pi_t, axis=-1, keepdims=True))
        g_beta += np.einsum("gta,gta->gt", gz, q_t)
        g_q = g_v[:, :, None] * pi_t + gz * beta[:, :, None]

    return g_beta * expit(raw)  # chain through softplus


def _loss_inputs(mdp: TabularMdp, config: MetaPlanConfig):
    op = BackupOperator(mdp)
    if config.state_weights is None:
        weights = np.ones(mdp.n_states)
    else:
        if config.state_weights.shape != (mdp.n_states,):
            raise ValueError("state_weights length must match the state count")
        weights = config.state_weights
    default = Policy.uniform(mdp.n_states, mdp.n_actions)
    return op, weights, np.log(default.probs)


def meta_loss_and_gradient(mdp: TabularMdp, temps: TemperatureField,
                           config: MetaPlanConfig) -> tuple[float, np.ndarray]:
    """Loss -sum_s w_s V(s) and its exact gradient in the raw parameters."""
    if temps.n_states != mdp.n_states:
        raise ValueError("temperature field does not match the MDP's state count")
    op, weights, default_log = _loss_inputs(mdp, config)
    loss, fw = _forward(op, temps.raw, config.horizon, config.cost_weight,
                        weights, default_log, want_tape=True)
    grad = _backward(op, temps.raw, fw, config.cost_weight, weights, default_log)
    return loss, grad


class _Adam:
    """Plain Adam with bias correction."""

    def __init__(self, shape, step_size, beta1, beta2, epsilon):
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    def step(self, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1 ** self.t)
        v_hat = self.v / (1 - self.beta2 ** self.t)
        return self.step_size * m_hat / (np.sqrt(v_hat) + self.epsilon)


def optimize(mdp: TabularMdp, config: MetaPlanConfig) -> MetaPlanResult:
    """Run the full temperature-allocation loop.

    Raw parameters start uniform on [init_low, init_high] under the config
    seed, then take ``outer_iterations`` Adam steps on the exact gradient.
    ``loss_history[i]`` is the loss at the parameters *before* step i.
    Deterministic for a fixed config.
    """
    start_time = time.perf_counter()
    op, weights, default_log = _loss_inputs(mdp, config)
    rng = np.random.default_rng(config.seed)
    raw = rng.uniform(config.init_low, config.init_high,
                      (mdp.n_states, mdp.n_states))
    adam = _Adam(raw.shape, config.step_size, config.beta1, config.beta2,
                 config.epsilon)
    history = np.empty(config.outer_iterations)
    for i in range(config.outer_iterations):
        loss, fw = _forward(op, raw, config.horizon, config.cost_weight,
                            weights, default_log, want_tape=True)
        if not np.isfinite(loss):
            raise RuntimeError(
                f"optimization diverged: non-finite loss {loss!r} at iteration {i}")
        history[i] = loss
        grad = _backward(op, raw, fw, config.cost_weight, weights, default_log)
        raw = raw - adam.step(grad)

    # recompute every reported quantity at the final parameters
    temps = TemperatureField(raw)
    plans = plan_all_states(mdp, temps, config.horizon)
    v_lambda = evaluate_meta_value(mdp, plans.acted_policy(), plans.total_cost,
                                   config.cost_weight)
    return MetaPlanResult(
        beta_star=temps,
        plans=plans,
        costs=plans.total_cost,
        v_lambda=v_lambda,
        loss_history=history,
        wall_time=time.perf_counter() - start_time,
        config=config,
    )


def pareto_sweep(mdp: TabularMdp, lambdas, probe_state: int,
                 config: MetaPlanConfig | None = None) -> list[ParetoPoint]:
    """Trade-off curve: optimize at each cost weight, record cost vs. value.

    The value coordinate is the expected discounted task reward of the
    optimized acted policies from ``probe_state``, evaluated with the
    planning-cost deduction switched off. Points come back sorted by
    cost weight.
    """
    lams = [float(l) for l in lambdas]
    if len(set(lams)) < 2:
        raise ValueError("pareto_sweep needs at least two distinct cost weights")
    if config is None:
        config = MetaPlanConfig(cost_weight=lams[0])
    probe = int(probe_state)
    zero_costs = np.zeros(mdp.n_states)
    points = []
    for lam in sorted(lams):
        result = optimize(mdp, replace(config, cost_weight=lam))
        task_value = evaluate_meta_value(mdp, result.plans.acted_policy(),
                                         zero_costs, 0.0)
        points.append(ParetoPoint(cost_weight=lam,
                                  planning_cost=float(result.costs[probe]),
                                  value=float(task_value[probe])))
    return points
