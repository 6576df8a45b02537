"""Shared fixtures: the four-rooms grid, seeded random MDPs, and the two
expensive optimization runs the acceptance tests share.

The acceptance module registers a pass/fail line per criterion; the
terminal-summary hook prints the collected table at the end of the run so
it survives pytest's output capturing.
"""

import numpy as np
import pytest

from metaplan import (MetaPlanConfig, TabularMdp, build_four_rooms, optimize)

ACCEPTANCE_RESULTS = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_RESULTS):
        verdict = "PASS" if passed else "FAIL"
        tr.write_line(f"criterion {number:2d}: {verdict} — {detail}")


def connected_maze(width: int, height: int, seed: int,
                   density=(0.1, 0.3)):
    """First generated maze whose open cells form one connected region.

    The teleportation pipeline requires this of its base mazes (a fresh
    A* runs from every teleport destination), while the generator only
    guarantees start-to-goal reachability.
    """
    from metaplan import generate_mazes

    for maze in generate_mazes(width, height, 20, seed=seed,
                               wall_density_range=density):
        seen = {maze.goal}
        queue = [maze.goal]
        while queue:
            r, c = queue.pop()
            for rr, cc in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
                if 0 <= rr < maze.height and 0 <= cc < maze.width \
                        and not maze.walls[rr, cc] and (rr, cc) not in seen:
                    seen.add((rr, cc))
                    queue.append((rr, cc))
        if len(seen) == int((~maze.walls).sum()):
            return maze
    raise RuntimeError("no fully connected maze in 20 draws")


def random_mdp(seed: int, n_states: int = 5, n_actions: int = 3,
               discount: float = 0.9, terminal_last: bool = True) -> TabularMdp:
    """Small dense MDP with Dirichlet transition rows and N(0,1) rewards."""
    rng = np.random.default_rng(seed)
    transition = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    reward = rng.normal(size=(n_states, n_actions, n_states))
    terminal = np.zeros(n_states, dtype=bool)
    if terminal_last:
        terminal[-1] = True
        transition[-1] = 0.0
        transition[-1, :, -1] = 1.0
        reward[-1] = 0.0
    return TabularMdp(transition=transition, reward=reward,
                      discount=discount, terminal=terminal)


@pytest.fixture(scope="session")
def four_rooms():
    return build_four_rooms()


@pytest.fixture(scope="session")
def sharp_run(four_rooms):
    """Cost-weight 0.01 allocation run tuned to reach a sparse temperature
    field within 200 iterations (deep init, large steps)."""
    mdp, _ = four_rooms
    config = MetaPlanConfig(cost_weight=0.01, outer_iterations=200,
                            horizon=100, step_size=0.30,
                            init_low=-9.0, init_high=-7.0, seed=0)
    return optimize(mdp, config)


@pytest.fixture(scope="session")
def zero_lambda_run(four_rooms):
    """Same schedule with the planning-cost term switched off."""
    mdp, _ = four_rooms
    config = MetaPlanConfig(cost_weight=0.0, outer_iterations=200,
                            horizon=100, step_size=0.30,
                            init_low=-9.0, init_high=-7.0, seed=0)
    return optimize(mdp, config)


@pytest.fixture(scope="session")
def smooth_run(four_rooms):
    """Gentler schedule whose moderately converged plans keep the
    room-by-room structure that the clustering analysis picks up."""
    mdp, _ = four_rooms
    config = MetaPlanConfig(cost_weight=0.01, outer_iterations=300,
                            horizon=100, step_size=0.03,
                            init_low=-6.0, init_high=-4.0, seed=0)
    return optimize(mdp, config)


@pytest.fixture(scope="session")
def goal_room_states(four_rooms):
    """State ids of the room containing the goal (upper right)."""
    _, maze = four_rooms
    ids = maze.state_ids()
    return {int(ids[r, c]) for r in range(0, 6) for c in range(6, 11)
            if not maze.walls[r, c]}
