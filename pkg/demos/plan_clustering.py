"""Do plans carve the four-rooms grid back into its rooms?

Optimizes a temperature allocation from every ground state, measures
pairwise distances between the resulting partial plans (symmetrized KL
over simulated states), and clusters states by plan similarity with
Ward's method. Cutting the tree at three clusters recovers the room
containing the goal as its own cluster — an option-like decomposition
read directly out of planning behavior.
"""

from pathlib import Path

import numpy as np

from metaplan import (MetaPlanConfig, build_four_rooms, cut, optimize,
                      plan_distance_matrix, render_heatmap_svg, ward_cluster)
from metaplan.outputs import write_csv

OUT = Path(__file__).parent / "out"

# A gentle schedule: moderately converged allocations keep room-level
# structure in the distance geometry (fully sparse plans are uniform
# almost everywhere and the rooms blur together).
CONFIG = MetaPlanConfig(cost_weight=0.01, outer_iterations=300, horizon=100,
                        step_size=0.03, init_low=-6.0, init_high=-4.0, seed=0)
K = 3


def main():
    OUT.mkdir(exist_ok=True)
    mdp, maze = build_four_rooms()
    print(f"optimizing allocations ({CONFIG.outer_iterations} iters)...")
    result = optimize(mdp, CONFIG)
    print(f"done in {result.wall_time:.1f}s")

    distances = plan_distance_matrix(result)
    dendrogram = ward_cluster(distances)
    labels = cut(dendrogram, K)

    ids = maze.state_ids()
    goal_room = {int(ids[r, c]) for r in range(0, 6) for c in range(6, 11)
                 if not maze.walls[r, c]}
    print(f"\nk={K} cut cluster sizes: "
          f"{sorted(np.bincount(labels).tolist())}")
    for label in np.unique(labels):
        members = set(np.flatnonzero(labels == label).tolist())
        cover = len(members & goal_room) / len(goal_room)
        marker = "  <- goal room" if cover >= 0.9 else ""
        print(f"  cluster {label}: {len(members):3d} states, covers "
              f"{cover:.0%} of the goal room{marker}")

    write_csv(OUT / "dendrogram.csv",
              ["step", "cluster_a", "cluster_b", "height", "size"],
              [(i, a, b, h, s)
               for i, (a, b, h, s) in enumerate(dendrogram.merges)])
    write_csv(OUT / "clusters.csv", ["state", "row", "col", "cluster"],
              [(s, r, c, int(labels[s]))
               for (r, c), s in np.ndenumerate(ids) if s >= 0])
    svg = render_heatmap_svg(maze, (labels + 1.0) / K, threshold=0.0)
    (OUT / "clusters.svg").write_text(svg)
    print(f"\nwrote dendrogram.csv, clusters.csv, clusters.svg under {OUT}")


if __name__ == "__main__":
    main()
