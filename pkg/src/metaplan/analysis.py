"""Plan-similarity analyses: pairwise planning distances, agglomerative
clustering of states by how similarly they plan, and a small regression
utility for relating predictors to external response data.

Clustering states of a gridworld by symmetric KL between their partial
plans recovers contiguous regions resembling option initiation sets
(e.g. rooms), with the goal's room splitting off first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metaplanner import MetaPlanResult
from .softplan import log_softmax

__all__ = [
    "Dendrogram",
    "symmetric_planning_distance",
    "plan_distance_matrix",
    "ward_cluster",
    "cut",
    "ols_fit",
]


def _log_plan_rows(result: MetaPlanResult) -> np.ndarray:
    """Log partial-plan policies recovered from the stored logits, so rows
    stay finite even where probabilities underflow."""
    beta = result.beta_star.beta
    return log_softmax(beta[:, :, None] * result.plans.q)


def symmetric_planning_distance(result: MetaPlanResult, state_a: int,
                                state_b: int) -> float:
    """Symmetrized KL between two states' partial plans, summed over
    simulated states, in nats. Zero iff the plans agree row for row."""
    a, b = int(state_a), int(state_b)
    logpi = _log_plan_rows(result)
    pi = result.plans.pi
    forward = np.sum(pi[a] * (logpi[a] - logpi[b]))
    backward = np.sum(pi[b] * (logpi[b] - logpi[a]))
    return float(max(forward + backward, 0.0))


def plan_distance_matrix(result: MetaPlanResult) -> np.ndarray:
    """All pairwise symmetric planning distances; symmetric, zero diagonal."""
    logpi = _log_plan_rows(result)
    n = result.plans.pi.shape[0]
    p = result.plans.pi.reshape(n, -1)
    lp = logpi.reshape(n, -1)
    self_terms = np.einsum("ik,ik->i", p, lp)
    cross = p @ lp.T  # cross[i, j] = sum_t,a pi_i log pi_j
    d = (self_terms[:, None] - cross) + (self_terms[None, :] - cross.T)
    d = np.maximum(d, 0.0)
    np.fill_diagonal(d, 0.0)
    return d


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history. Leaves are 0..n-1; the cluster created
    by merge i gets id n+i. Each merge records (a, b, height, merged size)."""

    n_leaves: int
    merges: tuple

    def heights(self) -> np.ndarray:
        return np.array([m[2] for m in self.merges])


def ward_cluster(distance_matrix: np.ndarray) -> Dendrogram:
    """Agglomerative clustering with Ward linkage, straight on the given
    dissimilarities via the Lance-Williams update.

    The input need not be Euclidean; the update is applied to the matrix
    as-is (the common statistical-package convention for precomputed
    dissimilarities). Merge heights are nondecreasing.
    """
    d = np.asarray(distance_matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.allclose(d, d.T, atol=1e-8):
        raise ValueError("distance matrix must be symmetric")
    if np.any(d < 0):
        raise ValueError("distances must be nonnegative")
    if np.any(np.abs(np.diag(d)) > 1e-12):
        raise ValueError("distance matrix must have a zero diagonal")
    n = d.shape[0]
    cur = d.copy()
    np.fill_diagonal(cur, np.inf)
    ids = list(range(n))
    sizes = [1] * n
    merges = []
    for step in range(n - 1):
        flat = np.argmin(cur)
        i, j = divmod(int(flat), cur.shape[0])
        if i > j:
            i, j = j, i
        height = float(cur[i, j])
        ni, nj = sizes[i], sizes[j]
        merges.append((ids[i], ids[j], height, ni + nj))
        # Lance-Williams with Ward coefficients against every other cluster
        nk = np.array(sizes, dtype=float)
        new_row = ((ni + nk) * cur[i] + (nj + nk) * cur[j]
                   - nk * height) / (ni + nj + nk)
        keep = [m for m in range(cur.shape[0]) if m not in (i, j)]
        cur = cur[np.ix_(keep, keep)]
        row = new_row[keep]
        cur = np.pad(cur, ((0, 1), (0, 1)), constant_values=0.0)
        cur[-1, :-1] = row
        cur[:-1, -1] = row
        cur[-1, -1] = np.inf
        ids = [ids[m] for m in keep] + [n + step]
        sizes = [sizes[m] for m in keep] + [ni + nj]
    return Dendrogram(n_leaves=n, merges=tuple(merges))


def cut(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Partition into k clusters by applying the first n-k merges.

    Returns one label per leaf, in 0..k-1, numbered by first appearance
    in leaf order.
    """
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    members = {i: [i] for i in range(n)}
    for step, (a, b, _, _) in enumerate(dendrogram.merges[: n - k]):
        members[n + step] = members.pop(a) + members.pop(b)
    labels = np.empty(n, dtype=int)
    order = sorted(members.values(), key=min)
    for label, leaves in enumerate(order):
        labels[leaves] = label
    return labels


def ols_fit(x, y) -> tuple[float, float, float]:
    """Ordinary least squares of y on x: (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("x and y must be equal-length 1-d arrays with >= 2 points")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise ValueError("x is constant; slope undefined")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    residual = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - ym) ** 2))
    r_squared = 0.0 if ss_tot == 0 else float(1.0 - np.sum(residual ** 2) / ss_tot)
    return slope, intercept, r_squared
