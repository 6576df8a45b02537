"""2D gridworld mazes: text format, symmetries, and conversion to MDPs.

A maze is a rectangular wall layout with one start and one goal cell. The
text format is one row per line: ``#`` wall, ``.`` open, ``S`` start,
``G`` goal, LF line endings, no trailing whitespace; the first line may be a
``//`` comment. Cells are (row, col) with row 0 at the top. State ids are
assigned row-major over open cells and are the ids used in every CSV output.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .mdp import TabularMdp

__all__ = [
    "GridMaze",
    "MazeError",
    "MazeParseError",
    "UnreachableGoalError",
    "parse_maze",
    "serialize_maze",
    "maze_to_mdp",
    "apply_symmetry",
    "build_four_rooms",
    "optimal_plan_length",
    "SYMMETRIES",
    "ACTIONS",
]


class MazeError(ValueError):
    """Base class for maze construction and parsing problems."""


class MazeParseError(MazeError):
    """Malformed maze text (bad character, ragged rows, bad S/G count)."""


class UnreachableGoalError(MazeError):
    """The goal cannot be reached from the start through open cells."""


# Action ids and their (row, col) deltas.
ACTIONS = ("up", "down", "left", "right")
_DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True, eq=False)
class GridMaze:
    """Wall layout plus start and goal cells.

    ``walls[r, c]`` is True for blocked cells. The constructor checks that
    start and goal are open and that the goal is reachable through
    4-connected open cells.
    """

    width: int
    height: int
    walls: np.ndarray
    start: tuple[int, int]
    goal: tuple[int, int]

    def __post_init__(self):
        w = np.asarray(self.walls, dtype=bool)
        object.__setattr__(self, "walls", w)
        object.__setattr__(self, "start", (int(self.start[0]), int(self.start[1])))
        object.__setattr__(self, "goal", (int(self.goal[0]), int(self.goal[1])))
        if w.shape != (self.height, self.width):
            raise MazeError(f"walls shape {w.shape} != (height, width)")
        for name, (r, c) in (("start", self.start), ("goal", self.goal)):
            if not (0 <= r < self.height and 0 <= c < self.width):
                raise MazeError(f"{name} {(r, c)} out of bounds")
            if w[r, c]:
                raise MazeError(f"{name} {(r, c)} is a wall cell")
        if self.goal not in self._reachable_from(self.start):
            raise UnreachableGoalError(f"goal {self.goal} unreachable from start {self.start}")

    def _reachable_from(self, cell: tuple[int, int]) -> set:
        seen = {cell}
        queue = deque([cell])
        while queue:
            r, c = queue.popleft()
            for dr, dc in _DELTAS:
                nxt = (r + dr, c + dc)
                if (0 <= nxt[0] < self.height and 0 <= nxt[1] < self.width
                        and not self.walls[nxt] and nxt not in seen):
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridMaze):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and self.start == other.start and self.goal == other.goal
                and bool(np.array_equal(self.walls, other.walls)))

    def __hash__(self):
        return hash((self.width, self.height, self.start, self.goal, self.walls.tobytes()))

    def is_open(self, cell) -> bool:
        r, c = int(cell[0]), int(cell[1])
        return (0 <= r < self.height and 0 <= c < self.width
                and not self.walls[r, c])

    def neighbors(self, cell) -> list[tuple[int, int]]:
        """Open 4-neighbors of a cell, in up/down/left/right order."""
        r, c = cell
        out = []
        for dr, dc in _DELTAS:
            nxt = (r + dr, c + dc)
            if self.is_open(nxt):
                out.append(nxt)
        return out

    def open_cells(self) -> list[tuple[int, int]]:
        """Open cells in row-major order; list index = state id."""
        return [(r, c) for r in range(self.height) for c in range(self.width)
                if not self.walls[r, c]]

    def state_ids(self) -> np.ndarray:
        """(height, width) array mapping cells to state ids, -1 on walls."""
        ids = np.full((self.height, self.width), -1, dtype=int)
        for i, (r, c) in enumerate(self.open_cells()):
            ids[r, c] = i
        return ids

    @property
    def n_open(self) -> int:
        return int((~self.walls).sum())


def parse_maze(text: str) -> GridMaze:
    """Parse the grid text format; inverse of :func:`serialize_maze`."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if lines and lines[0].startswith("//"):
        lines = lines[1:]
    if not lines:
        raise MazeParseError("empty maze text")
    width = len(lines[0])
    if width == 0:
        raise MazeParseError("empty maze row")
    starts, goals = [], []
    walls = np.zeros((len(lines), width), dtype=bool)
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MazeParseError(f"ragged row {r}: expected width {width}, got {len(line)}")
        for c, ch in enumerate(line):
            if ch == "#":
                walls[r, c] = True
            elif ch == "S":
                starts.append((r, c))
            elif ch == "G":
                goals.append((r, c))
            elif ch != ".":
                raise MazeParseError(f"invalid character {ch!r} at row {r}, col {c}")
    if len(starts) != 1:
        raise MazeParseError(f"maze must have exactly one S, found {len(starts)}")
    if len(goals) != 1:
        raise MazeParseError(f"maze must have exactly one G, found {len(goals)}")
    return GridMaze(width=width, height=len(lines), walls=walls,
                    start=starts[0], goal=goals[0])


def serialize_maze(maze: GridMaze) -> str:
    """Canonical text form; ``parse_maze(serialize_maze(m)) == m`` bit-exactly."""
    rows = []
    for r in range(maze.height):
        chars = []
        for c in range(maze.width):
            if maze.walls[r, c]:
                chars.append("#")
            elif (r, c) == maze.start:
                chars.append("S")
            elif (r, c) == maze.goal:
                chars.append("G")
            else:
                chars.append(".")
        rows.append("".join(chars))
    return "\n".join(rows) + "\n"


def maze_to_mdp(maze: GridMaze, step_reward: float = -0.1,
                goal_reward: float = 100.0, discount: float = 0.99) -> TabularMdp:
    """Deterministic 4-action MDP over the maze's open cells.

    Moving into a wall or off the grid leaves the state unchanged; every
    action pays ``step_reward``; transitions entering the goal additionally
    pay ``goal_reward``; the goal is terminal (absorbing, no further reward).
    State ids are row-major over open cells (see :meth:`GridMaze.state_ids`).
    """
    if not 0.0 <= discount < 1.0:
        raise ValueError(f"discount must lie in [0, 1), got {discount}")
    cells = maze.open_cells()
    ids = maze.state_ids()
    n = len(cells)
    n_a = len(ACTIONS)
    transition = np.zeros((n, n_a, n))
    reward = np.zeros((n, n_a, n))
    goal_id = ids[maze.goal]
    for s, (r, c) in enumerate(cells):
        for a, (dr, dc) in enumerate(_DELTAS):
            nr, nc = r + dr, c + dc
            blocked = not (0 <= nr < maze.height and 0 <= nc < maze.width) or maze.walls[nr, nc]
            s_next = s if blocked else ids[nr, nc]
            transition[s, a, s_next] = 1.0
            reward[s, a, s_next] = step_reward + (goal_reward if s_next == goal_id and s != goal_id else 0.0)
    terminal = np.zeros(n, dtype=bool)
    terminal[goal_id] = True
    # absorbing goal: self-loops, no reward
    transition[goal_id] = 0.0
    transition[goal_id, :, goal_id] = 1.0
    reward[goal_id] = 0.0
    return TabularMdp(transition=transition, reward=reward, discount=discount, terminal=terminal)


# Coordinate maps for the eight symmetries of an n x n square, as
# (r, c) -> (r', c'). Rotations are counterclockwise.
SYMMETRIES = ("identity", "rot90", "rot180", "rot270",
              "flip_h", "flip_v", "transpose", "anti_transpose")


def _sym_map(sym: str, n: int):
    if sym == "identity":
        return lambda r, c: (r, c)
    if sym == "rot90":
        return lambda r, c: (n - 1 - c, r)
    if sym == "rot180":
        return lambda r, c: (n - 1 - r, n - 1 - c)
    if sym == "rot270":
        return lambda r, c: (c, n - 1 - r)
    if sym == "flip_h":
        return lambda r, c: (r, n - 1 - c)
    if sym == "flip_v":
        return lambda r, c: (n - 1 - r, c)
    if sym == "transpose":
        return lambda r, c: (c, r)
    if sym == "anti_transpose":
        return lambda r, c: (n - 1 - c, n - 1 - r)
    raise ValueError(f"unknown symmetry {sym!r}; choose one of {SYMMETRIES}")


def apply_symmetry(maze: GridMaze, sym: str) -> GridMaze:
    """Map a square maze under one of the eight symmetries of the square."""
    if maze.width != maze.height:
        raise MazeError("symmetries require a square maze")
    n = maze.width
    f = _sym_map(sym, n)
    walls = np.zeros_like(maze.walls)
    for r in range(n):
        for c in range(n):
            walls[f(r, c)] = maze.walls[r, c]
    return GridMaze(width=n, height=n, walls=walls,
                    start=f(*maze.start), goal=f(*maze.goal))


# Standard 11x11 four-rooms layout: four rooms joined by four doorways, goal
# in the upper-right corner, start in the lower-left. 104 open cells.
_FOUR_ROOMS = """\
.....#....G
.....#.....
...........
.....#.....
.....#.....
#.####.....
.....###.##
.....#.....
.....#.....
...........
S....#.....
"""

# Doorway cells of the layout above (row, col).
FOUR_ROOMS_DOORWAYS = ((2, 5), (9, 5), (5, 1), (6, 8))


def build_four_rooms(step_reward: float = -0.1, goal_reward: float = 100.0,
                     discount: float = 0.99) -> tuple[TabularMdp, GridMaze]:
    """The four-rooms gridworld: +100 terminal goal upper-right, -0.1 steps."""
    maze = parse_maze(_FOUR_ROOMS)
    return maze_to_mdp(maze, step_reward, goal_reward, discount), maze


def optimal_plan_length(maze: GridMaze, start: tuple[int, int] | None = None,
                        goal: tuple[int, int] | None = None) -> int:
    """Shortest-path length in moves between two cells (BFS, 4-connected)."""
    start = maze.start if start is None else tuple(start)
    goal = maze.goal if goal is None else tuple(goal)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        if cell == goal:
            return dist[cell]
        r, c = cell
        for dr, dc in _DELTAS:
            nxt = (r + dr, c + dc)
            if (0 <= nxt[0] < maze.height and 0 <= nxt[1] < maze.width
                    and not maze.walls[nxt] and nxt not in dist):
                dist[nxt] = dist[cell] + 1
                queue.append(nxt)
    raise UnreachableGoalError(f"goal {goal} unreachable from {start}")
