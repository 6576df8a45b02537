"""How does the plan's information cost relate to classic difficulty measures?

Generates a small batch of mazes, computes for each the optimized
partial-plan cost at the start plus a battery of standard predictors
(A* expansions, solution length, ITBR cost, entropies, VI sweeps, path
turns), and regresses each predictor against the plan cost. None of the
baselines tracks it perfectly — the allocation cost is its own signal.
"""

from pathlib import Path

import numpy as np

from metaplan import (MetaPlanConfig, astar, generate_mazes,
                      itbr_first_step_cost, maze_to_mdp, ols_fit,
                      optimal_plan_length, optimize, soft_bellman_entropy,
                      softmax_entropy, trajectory_turns, value_iteration)
from metaplan.outputs import write_csv

OUT = Path(__file__).parent / "out"
CONFIG = MetaPlanConfig(cost_weight=0.01, outer_iterations=60, horizon=40,
                        seed=0)
N_MAZES = 10


def main():
    OUT.mkdir(exist_ok=True)
    mazes = generate_mazes(9, 9, N_MAZES, seed=5)
    print(f"scoring {N_MAZES} generated 9x9 mazes...")

    rows = []
    for i, maze in enumerate(mazes):
        mdp = maze_to_mdp(maze)
        start = int(maze.state_ids()[maze.start])
        result = optimize(mdp, CONFIG)
        vi = value_iteration(mdp)
        search = astar(maze)
        rows.append((
            f"maze_{i:02d}",
            float(result.costs[start]),
            search.expanded_count,
            optimal_plan_length(maze),
            itbr_first_step_cost(mdp, 1.0, start),
            softmax_entropy(vi.q, start),
            soft_bellman_entropy(mdp, start),
            vi.iterations,
            trajectory_turns(mdp, vi.q, start, n_samples=30),
        ))
        print(f"  maze_{i:02d}: plan cost {rows[-1][1]:6.2f} nats, "
              f"A* expanded {search.expanded_count:2d}, "
              f"length {rows[-1][3]}")

    header = ["maze_id", "partial_plan_cost", "astar_expanded",
              "optimal_plan_length", "itbr_cost", "softmax_entropy",
              "soft_bellman_entropy", "vi_iterations", "trajectory_turns"]
    write_csv(OUT / "maze_predictors.csv", header, rows,
              metadata={"seed": CONFIG.seed, "lambda": CONFIG.cost_weight})

    cost = np.array([r[1] for r in rows])
    print("\nvariance in plan cost explained by each baseline (r^2):")
    for col in range(2, len(header)):
        x = np.array([float(r[col]) for r in rows])
        if np.ptp(x) == 0:
            print(f"  {header[col]:>22}: constant across batch")
            continue
        _, _, r2 = ols_fit(x, cost)
        print(f"  {header[col]:>22}: {r2:.3f}")

    print(f"\nwrote {OUT / 'maze_predictors.csv'}")


if __name__ == "__main__":
    main()
