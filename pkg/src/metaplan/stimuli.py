"""Stimulus pipelines: batches of random solvable mazes, symmetry-expanded
base mazes, and cost-stratified subset selection.

Mazes are generated corner-to-corner (start lower right, goal upper left)
by i.i.d. wall placement with rejection until solvable — the resulting
stimuli have loops and open areas rather than perfect-maze corridors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .maze import (GridMaze, MazeError, SYMMETRIES, UnreachableGoalError,
                   apply_symmetry, maze_to_mdp)
from .metaplanner import MetaPlanConfig, optimize

__all__ = [
    "SelectionResult",
    "generate_mazes",
    "expand_with_symmetries",
    "start_plan_cost",
    "select_spanning_costs",
]


def generate_mazes(width: int, height: int, count: int, seed: int,
                   wall_density_range: tuple[float, float] = (0.0, 0.4),
                   max_attempts: int = 10_000) -> list[GridMaze]:
    """Random solvable mazes with start at the lower right and goal at the
    upper left. Each maze draws its own wall density from the given range,
    then rejection-samples wall layouts until the goal is reachable.
    Deterministic for a fixed seed.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if width < 3 or height < 3:
        raise ValueError("mazes need width and height of at least 3")
    lo, hi = wall_density_range
    if not (0.0 <= lo <= hi <= 0.6):
        raise ValueError("wall densities must satisfy 0 <= low <= high <= 0.6")
    start = (height - 1, width - 1)
    goal = (0, 0)
    rng = np.random.default_rng(seed)
    mazes = []
    for _ in range(count):
        density = rng.uniform(lo, hi)
        for _ in range(max_attempts):
            walls = rng.random((height, width)) < density
            walls[start] = False
            walls[goal] = False
            try:
                mazes.append(GridMaze(width=width, height=height, walls=walls,
                                      start=start, goal=goal))
                break
            except UnreachableGoalError:
                continue
        else:
            raise MazeError(
                f"no solvable {width}x{height} maze at density {density:.3f} "
                f"after {max_attempts} attempts")
    return mazes


def expand_with_symmetries(mazes) -> list[tuple[int, str, GridMaze]]:
    """Every maze under all eight square symmetries, as
    (base index, symmetry name, transformed maze) triples — one stimulus
    per condition label."""
    out = []
    for i, maze in enumerate(mazes):
        for sym in SYMMETRIES:
            out.append((i, sym, apply_symmetry(maze, sym)))
    return out


def start_plan_cost(maze: GridMaze, config: MetaPlanConfig) -> float:
    """Optimized planning cost (nats) at a maze's start state."""
    mdp = maze_to_mdp(maze)
    result = optimize(mdp, config)
    start_id = int(maze.state_ids()[maze.start])
    return float(result.costs[start_id])


@dataclass(frozen=True)
class SelectionResult:
    """Cost-stratified subset: the chosen mazes, their indices into the
    input batch, their start-state costs, the full batch's costs, and
    whether any empty bin forced sampling with replacement."""

    mazes: list
    indices: np.ndarray
    costs: np.ndarray
    all_costs: np.ndarray
    with_replacement: bool


def select_spanning_costs(mazes, config: MetaPlanConfig, k: int,
                          seed: int) -> SelectionResult:
    """Pick k mazes spanning the batch's range of optimized planning costs.

    Computes each maze's start-state cost, splits the batch into k quantile
    bins, and samples one maze per bin. Bins left empty by ties fall back
    to uniform sampling with replacement over the whole batch, and the
    result is flagged accordingly.
    """
    mazes = list(mazes)
    if not 1 <= k <= len(mazes):
        raise ValueError("k must be between 1 and the number of mazes")
    all_costs = np.array([start_plan_cost(m, config) for m in mazes])
    edges = np.quantile(all_costs, np.linspace(0.0, 1.0, k + 1))
    bins = np.searchsorted(edges[1:-1], all_costs, side="right")
    rng = np.random.default_rng(seed)
    flagged = len(np.unique(all_costs)) < k
    indices = []
    for b in range(k):
        members = np.flatnonzero(bins == b)
        if len(members) > 0:
            indices.append(int(members[rng.integers(len(members))]))
        else:
            flagged = True
            indices.append(int(rng.integers(len(mazes))))
    indices = np.array(indices)
    return SelectionResult(
        mazes=[mazes[i] for i in indices],
        indices=indices,
        costs=all_costs[indices],
        all_costs=all_costs,
        with_replacement=flagged,
    )
