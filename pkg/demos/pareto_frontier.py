"""The planning-cost / task-value trade-off on four rooms.

Sweeps the cost weight lambda over a log grid and records, at the start
state, how many nats the optimized allocation spends against how much
discounted return its acted policies collect. Expensive thought buys
value with sharply diminishing returns: the frontier is steep near zero
cost and flat once the corridor is fully planned.

Takes a few minutes (one full optimization per lambda).
"""

from pathlib import Path

import numpy as np

from metaplan import build_four_rooms, pareto_sweep
from metaplan.outputs import write_csv

OUT = Path(__file__).parent / "out"
LAMBDAS = np.logspace(-3.0, 0.0, 6)


def main():
    OUT.mkdir(exist_ok=True)
    mdp, maze = build_four_rooms()
    probe = int(maze.state_ids()[maze.start])

    print(f"sweeping lambda over {len(LAMBDAS)} points in "
          f"[{LAMBDAS[0]:g}, {LAMBDAS[-1]:g}]...")
    points = pareto_sweep(mdp, LAMBDAS, probe)

    print(f"\n{'lambda':>8} {'cost (nats)':>12} {'value':>8}")
    for p in points:
        print(f"{p.cost_weight:8.4f} {p.planning_cost:12.3f} {p.value:8.3f}")

    cheapest, dearest = points[-1], points[0]
    saved = dearest.planning_cost - cheapest.planning_cost
    print(f"\nraising lambda {dearest.cost_weight:g} -> {cheapest.cost_weight:g} "
          f"saves {saved:.1f} nats of planning")
    print(f"and gives up only {dearest.value - cheapest.value:.2f} "
          f"in expected return")

    write_csv(OUT / "frontier.csv",
              ["lambda", "planning_cost_nats", "expected_value"],
              [(p.cost_weight, p.planning_cost, p.value) for p in points])
    print(f"\nwrote {OUT / 'frontier.csv'}")


if __name__ == "__main__":
    main()
