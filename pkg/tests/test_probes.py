"""Teleportation probes: event simulation and plan-divergence metric."""

import numpy as np
import pytest

from metaplan import (MazeError, MetaPlanConfig, Policy, build_four_rooms,
                      discounted_occupancy, maze_to_mdp, optimal_plan_length,
                      optimize, parse_maze, partial_plan_divergence,
                      simulate_teleport_events, teleport_distance)
from metaplan.softplan import log_softmax

SMALL_MAZE = "G...\n.#..\n....\n...S\n"


@pytest.fixture(scope="module")
def small_run():
    maze = parse_maze(SMALL_MAZE)
    mdp = maze_to_mdp(maze)
    config = MetaPlanConfig(cost_weight=0.02, outer_iterations=40,
                            horizon=25, seed=0)
    return maze, mdp, optimize(mdp, config)


class TestSimulateEvents:
    def test_event_fields_well_formed(self):
        maze = parse_maze(SMALL_MAZE)
        length = optimal_plan_length(maze)
        events = simulate_teleport_events(maze, count=50, seed=1,
                                          maze_id="m0")
        assert len(events) == 50
        open_cells = set(maze.open_cells())
        for ev in events:
            assert ev.maze_id == "m0"
            assert 1 <= ev.step_index <= length
            assert ev.pre_state in open_cells
            assert ev.post_state in open_cells
            assert ev.post_state != maze.goal
            assert ev.seed == 1

    def test_pre_state_lies_on_an_optimal_path(self):
        maze = parse_maze(SMALL_MAZE)
        length = optimal_plan_length(maze)
        for ev in simulate_teleport_events(maze, count=30, seed=2):
            # the n-th state of a shortest path is n-1 moves from the start
            # and length-(n-1) moves from the goal
            n = ev.step_index
            assert optimal_plan_length(maze, start=maze.start,
                                       goal=ev.pre_state) == n - 1
            assert optimal_plan_length(maze, start=ev.pre_state,
                                       goal=maze.goal) == length - (n - 1)

    def test_first_step_index_is_start(self):
        maze = parse_maze(SMALL_MAZE)
        events = simulate_teleport_events(maze, count=200, seed=3)
        firsts = [ev for ev in events if ev.step_index == 1]
        assert firsts and all(ev.pre_state == maze.start for ev in firsts)

    def test_deterministic_under_seed(self):
        maze = parse_maze(SMALL_MAZE)
        a = simulate_teleport_events(maze, count=20, seed=7)
        b = simulate_teleport_events(maze, count=20, seed=7)
        assert a == b

    def test_count_validation(self):
        maze = parse_maze(SMALL_MAZE)
        with pytest.raises(ValueError):
            simulate_teleport_events(maze, count=0, seed=0)

    def test_degenerate_maze_rejected(self):
        # only open cells are the start and the goal
        maze = parse_maze("G#\nS#\n")
        with pytest.raises(MazeError, match="non-goal"):
            simulate_teleport_events(maze, count=1, seed=0)

    def test_precomputed_solution_matches(self, small_run):
        maze, mdp, _ = small_run
        from metaplan import value_iteration
        vi = value_iteration(mdp)
        a = simulate_teleport_events(maze, count=15, seed=9)
        b = simulate_teleport_events(maze, count=15, seed=9, mdp=mdp,
                                     q_star=vi.q)
        assert a == b


class TestDivergence:
    def test_identical_states_near_zero(self, small_run):
        _, mdp, result = small_run
        for s in range(mdp.n_states):
            assert 0.0 <= partial_plan_divergence(result, mdp, s, s) <= 1e-9

    def test_nonnegative_everywhere(self, small_run):
        _, mdp, result = small_run
        rng = np.random.default_rng(0)
        for _ in range(100):
            pre, post = rng.integers(0, mdp.n_states, size=2)
            d = partial_plan_divergence(result, mdp, int(pre), int(post))
            assert d >= 0.0 and np.isfinite(d)

    def test_matches_manual_joint_kl(self, small_run):
        # independent reconstruction of the joint KL from public pieces
        _, mdp, result = small_run
        pre, post = 2, 7
        smoothing = 1e-6
        n = mdp.n_states

        def joint(state):
            pi = result.plans.pi[state]
            rho = discounted_occupancy(mdp, Policy(pi), state)
            rho = (1.0 - smoothing) * rho + smoothing / n
            return pi * rho[:, None]

        jp, jq = joint(post), joint(pre)
        mask = jp > 0
        manual = float(np.sum(jp[mask] * np.log(jp[mask] / jq[mask])))
        d = partial_plan_divergence(result, mdp, pre, post,
                                    smoothing=smoothing)
        assert np.isclose(d, manual, atol=1e-8)

    def test_asymmetric_in_general(self, small_run):
        _, mdp, result = small_run
        ab = partial_plan_divergence(result, mdp, 0, 10)
        ba = partial_plan_divergence(result, mdp, 10, 0)
        assert not np.isclose(ab, ba, atol=1e-12)

    def test_smoothing_validation(self, small_run):
        _, mdp, result = small_run
        for bad in (0.0, 1.0, -0.1):
            with pytest.raises(ValueError):
                partial_plan_divergence(result, mdp, 0, 1, smoothing=bad)

    def test_finite_under_sharp_plans(self, four_rooms, sharp_run):
        # sharp temperature fields underflow many policy entries to exact
        # zeros; the divergence must stay finite because log-probabilities
        # are recomputed from the logits
        mdp, maze = four_rooms
        ids = maze.state_ids()
        start = int(ids[maze.start])
        far = int(ids[maze.goal[0] + 1, maze.goal[1]])
        d = partial_plan_divergence(sharp_run, mdp, start, far)
        assert np.isfinite(d) and d >= 0


class TestTeleportDistance:
    def test_euclidean(self):
        assert teleport_distance((0, 0), (3, 4)) == 5.0
        assert teleport_distance((2, 2), (2, 2)) == 0.0
        assert np.isclose(teleport_distance((1, 1), (2, 2)), np.sqrt(2.0))
