"""Command-line surface tying the library together.

Subcommands: solve, pareto, predictors (exp1/exp2), gen-mazes,
select-stimuli, cluster, regress. Exit codes: 0 success, 1 usage error,
2 input-data error; diagnostics go to stderr. All CSV outputs carry a
metadata comment (seed, config hash) and reproduce byte-for-byte under
identical flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import cut, ols_fit, plan_distance_matrix, ward_cluster
from .baselines import (astar, astar_node_difference, itbr_first_step_cost,
                        soft_bellman_entropy, softmax_entropy,
                        trajectory_turns, vi_iterations)
from .maze import (GridMaze, MazeError, build_four_rooms, maze_to_mdp,
                   optimal_plan_length, parse_maze, serialize_maze)
from .mdp import value_iteration
from .metaplanner import MetaPlanConfig, optimize, pareto_sweep
from .outputs import atomic_write_text, config_hash, read_csv, write_csv, write_json
from .probes import (partial_plan_divergence, simulate_teleport_events,
                     teleport_distance)
from .render import render_heatmap_svg
from .stimuli import expand_with_symmetries, generate_mazes, select_spanning_costs

__all__ = ["main"]


class _DataError(Exception):
    """Problem with user-supplied data (missing file, bad contents)."""


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this project reserves 2 for bad
    input data, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _lambda_list(text: str):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad cost-weight list: {exc}")
    if len(set(values)) < 2:
        raise argparse.ArgumentTypeError(
            "need at least two distinct cost weights")
    return values


def _add_run_flags(sub, default_lambda=0.01, default_iters=200):
    sub.add_argument("--lambda", dest="cost_weight", type=float,
                     default=default_lambda, metavar="X",
                     help="planning-cost weight (default %(default)s)")
    sub.add_argument("--horizon", type=int, default=100,
                     help="soft-Bellman sweeps per plan (default %(default)s)")
    sub.add_argument("--iters", type=int, default=default_iters,
                     help="Adam iterations (default %(default)s)")
    sub.add_argument("--seed", type=int, default=0)


def _add_maze_source(sub, required=True):
    grp = sub.add_mutually_exclusive_group(required=required)
    grp.add_argument("--maze", metavar="FILE", help="maze text file")
    grp.add_argument("--four-rooms", action="store_true",
                     help="use the built-in four-rooms grid")


def _load_maze(args) -> tuple:
    if getattr(args, "four_rooms", False):
        return build_four_rooms()
    path = Path(args.maze)
    if not path.exists():
        raise _DataError(f"maze file not found: {path}")
    maze = parse_maze(path.read_text())
    return maze_to_mdp(maze), maze


def _resolve_cell(maze: GridMaze, spec: str):
    named = {
        "start": maze.start,
        "goal": maze.goal,
        "lower-left": (maze.height - 1, 0),
        "lower-right": (maze.height - 1, maze.width - 1),
        "upper-left": (0, 0),
        "upper-right": (0, maze.width - 1),
    }
    if spec in named:
        cell = named[spec]
    else:
        try:
            r, c = (int(p) for p in spec.split(","))
        except ValueError:
            raise _DataError(f"bad cell spec {spec!r}: use a name or 'row,col'")
        cell = (r, c)
    if not maze.is_open(cell):
        raise _DataError(f"cell {cell} is not an open cell of the maze")
    return cell


def _state_id(maze: GridMaze, cell) -> int:
    return int(maze.state_ids()[cell])


def _config_from(args) -> MetaPlanConfig:
    return MetaPlanConfig(cost_weight=args.cost_weight,
                          outer_iterations=args.iters,
                          horizon=args.horizon,
                          seed=args.seed)


def _maze_files(directory: str) -> list:
    path = Path(directory)
    if not path.is_dir():
        raise _DataError(f"not a directory: {path}")
    files = sorted(path.glob("*.txt"))
    if not files:
        raise _DataError(f"no maze files (*.txt) in {path}")
    return files


# ---------------------------------------------------------------- solve


def _cmd_solve(args) -> int:
    mdp, maze = _load_maze(args)
    config = _config_from(args)
    result = optimize(mdp, config)
    ground = _state_id(maze, _resolve_cell(maze, args.ground_state))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"seed": args.seed, "config": config_hash(config.to_dict())}

    write_json(out / "run.json", {
        "config": config.to_dict(),
        "loss_history": [float(x) for x in result.loss_history],
        "wall_time": result.wall_time,
        "ground_state": ground,
    })
    n = mdp.n_states
    write_csv(out / "kl.csv", ["ground_state", "sim_state", "kl_nats"],
              ((g, t, result.plans.kl[g, t]) for g in range(n) for t in range(n)),
              metadata=meta)
    cells = maze.open_cells()
    write_csv(out / "costs.csv", ["state", "row", "col", "cost_nats"],
              ((s, cells[s][0], cells[s][1], result.costs[s]) for s in range(n)),
              metadata=meta)
    svg = render_heatmap_svg(maze, result.plans.kl[ground],
                             threshold=args.display_threshold)
    atomic_write_text(out / "heatmap.svg", svg)
    print(f"wrote {out}/run.json kl.csv costs.csv heatmap.svg "
          f"(ground state {ground}, final loss {result.loss_history[-1]:.6g})")
    return 0


# ---------------------------------------------------------------- pareto


def _cmd_pareto(args) -> int:
    mdp, maze = _load_maze(args)
    probe = _state_id(maze, _resolve_cell(maze, args.probe_state))
    config = MetaPlanConfig(cost_weight=args.lambdas[0],
                            outer_iterations=args.iters,
                            horizon=args.horizon, seed=args.seed)
    points = pareto_sweep(mdp, args.lambdas, probe, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "frontier.csv",
              ["lambda", "planning_cost_nats", "expected_value"],
              ((p.cost_weight, p.planning_cost, p.value) for p in points),
              metadata={"seed": args.seed, "probe_state": probe,
                        "config": config_hash(config.to_dict())})
    print(f"wrote {out}/frontier.csv ({len(points)} points)")
    return 0


# ---------------------------------------------------------------- predictors


def _cmd_predictors_exp1(args) -> int:
    files = _maze_files(args.mazes)
    config = _config_from(args)
    rows = []
    for path in files:
        maze = parse_maze(path.read_text())
        mdp = maze_to_mdp(maze)
        start = _state_id(maze, maze.start)
        result = optimize(mdp, config)
        vi = value_iteration(mdp)
        search = astar(maze)
        rows.append((
            path.stem,
            float(result.costs[start]),
            search.expanded_count,
            search.inserted_count,
            optimal_plan_length(maze),
            itbr_first_step_cost(mdp, args.itbr_alpha, start),
            softmax_entropy(vi.q, start, beta=1.0),
            soft_bellman_entropy(mdp, start, beta=1.0),
            vi.iterations,
            trajectory_turns(mdp, vi.q, start, n_samples=args.turn_samples,
                             seed=args.seed),
        ))
    write_csv(args.out,
              ["maze_id", "partial_plan_cost", "astar_expanded",
               "astar_inserted", "optimal_plan_length", "itbr_cost",
               "softmax_entropy", "soft_bellman_entropy", "vi_iterations",
               "trajectory_turns"],
              rows,
              metadata={"seed": args.seed,
                        "config": config_hash(config.to_dict()),
                        "itbr_alpha": args.itbr_alpha})
    print(f"wrote {args.out} ({len(rows)} mazes)")
    return 0


def _cmd_predictors_exp2(args) -> int:
    files = _maze_files(args.base_mazes)
    bases = [parse_maze(p.read_text()) for p in files]
    stimuli = expand_with_symmetries(bases)
    config = _config_from(args)
    event_seeds = np.random.default_rng(args.seed).integers(
        0, 2**63 - 1, size=len(stimuli))
    rows = []
    for (base_idx, sym, maze), ev_seed in zip(stimuli, event_seeds):
        maze_id = f"{files[base_idx].stem}-{sym}"
        mdp = maze_to_mdp(maze)
        vi = value_iteration(mdp)
        result = optimize(mdp, config)
        ids = maze.state_ids()
        events = simulate_teleport_events(
            maze, args.events_per_maze, seed=int(ev_seed), maze_id=maze_id,
            mdp=mdp, q_star=vi.q)
        for ev in events:
            rows.append((
                ev.maze_id,
                ev.pre_state[0], ev.pre_state[1],
                ev.post_state[0], ev.post_state[1],
                ev.step_index, ev.seed,
                partial_plan_divergence(result, mdp,
                                        int(ids[ev.pre_state]),
                                        int(ids[ev.post_state])),
                astar(maze, start=ev.post_state).expanded_count,
                astar_node_difference(maze, ev.pre_state, ev.post_state),
                optimal_plan_length(maze, start=ev.post_state),
                teleport_distance(ev.pre_state, ev.post_state),
            ))
    write_csv(args.out,
              ["maze_id", "pre_row", "pre_col", "post_row", "post_col",
               "step_index", "seed", "partial_plan_divergence",
               "astar_destination_nodes", "astar_node_difference",
               "optimal_path_length_post", "teleport_distance"],
              rows,
              metadata={"seed": args.seed,
                        "config": config_hash(config.to_dict()),
                        "events_per_maze": args.events_per_maze})
    print(f"wrote {args.out} ({len(stimuli)} stimuli, {len(rows)} events)")
    return 0


# ---------------------------------------------------------------- stimuli


def _cmd_gen_mazes(args) -> int:
    mazes = generate_mazes(args.width, args.height, args.count, args.seed,
                           wall_density_range=(args.density_low,
                                               args.density_high))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, maze in enumerate(mazes):
        name = f"maze_{i:04d}"
        atomic_write_text(out / f"{name}.txt", serialize_maze(maze))
        rows.append((name, f"{name}.txt", maze.width, maze.height,
                     int(maze.walls.sum()), optimal_plan_length(maze)))
    write_csv(out / "index.csv",
              ["maze_id", "file", "width", "height", "wall_count",
               "optimal_length"],
              rows,
              metadata={"seed": args.seed, "density_low": args.density_low,
                        "density_high": args.density_high})
    print(f"wrote {len(mazes)} mazes to {out}")
    return 0


def _cmd_select_stimuli(args) -> int:
    files = _maze_files(args.mazes)
    mazes = [parse_maze(p.read_text()) for p in files]
    if args.k > len(mazes):
        raise _DataError(f"k={args.k} exceeds the {len(mazes)} available mazes")
    config = _config_from(args)
    selection = select_spanning_costs(mazes, config, args.k, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "selection.csv",
              ["rank", "maze_id", "start_cost_nats"],
              ((rank, files[idx].stem, cost)
               for rank, (idx, cost) in enumerate(zip(selection.indices,
                                                      selection.costs))),
              metadata={"seed": args.seed,
                        "config": config_hash(config.to_dict()),
                        "with_replacement": selection.with_replacement})
    print(f"wrote {out}/selection.csv "
          f"({args.k} of {len(mazes)} mazes"
          f"{', WITH REPLACEMENT' if selection.with_replacement else ''})")
    return 0


# ---------------------------------------------------------------- cluster


def _cmd_cluster(args) -> int:
    mdp, maze = _load_maze(args)
    config = _config_from(args)
    result = optimize(mdp, config)
    distances = plan_distance_matrix(result)
    dendro = ward_cluster(distances)
    labels = cut(dendro, args.k)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"seed": args.seed, "config": config_hash(config.to_dict()),
            "k": args.k}
    write_csv(out / "dendrogram.csv",
              ["step", "cluster_a", "cluster_b", "height", "size"],
              ((i, a, b, h, size)
               for i, (a, b, h, size) in enumerate(dendro.merges)),
              metadata=meta)
    cells = maze.open_cells()
    write_csv(out / "clusters.csv",
              ["state", "row", "col", "cluster"],
              ((s, cells[s][0], cells[s][1], int(labels[s]))
               for s in range(len(cells))),
              metadata=meta)
    sizes = np.bincount(labels, minlength=args.k)
    print(f"wrote {out}/dendrogram.csv clusters.csv "
          f"(cluster sizes: {', '.join(map(str, sizes))})")
    return 0


# ---------------------------------------------------------------- regress


def _cmd_regress(args) -> int:
    path = Path(args.csv)
    if not path.exists():
        raise _DataError(f"CSV file not found: {path}")
    header, rows = read_csv(path)
    for col in (args.x, args.y):
        if col not in header:
            raise _DataError(f"column {col!r} not in {path} (has {header})")
    ix, iy = header.index(args.x), header.index(args.y)
    try:
        x = [float(r[ix]) for r in rows]
        y = [float(r[iy]) for r in rows]
    except (ValueError, IndexError) as exc:
        raise _DataError(f"non-numeric or ragged data in {path}: {exc}")
    try:
        slope, intercept, r_squared = ols_fit(x, y)
    except ValueError as exc:
        raise _DataError(str(exc))
    print(f"slope={slope:.17g} intercept={intercept:.17g} "
          f"r_squared={r_squared:.17g}")
    return 0


# ---------------------------------------------------------------- wiring


def build_parser() -> _Parser:
    parser = _Parser(prog="metaplan",
                     description="Meta-planning toolkit for tabular MDPs")
    subs = parser.add_subparsers(dest="command", required=True,
                                 parser_class=_Parser)

    solve = subs.add_parser("solve", help="optimize temperatures on one maze")
    _add_maze_source(solve)
    _add_run_flags(solve)
    solve.add_argument("--ground-state", default="start",
                       help="state whose plan the heatmap shows "
                            "(name or 'row,col'; default start)")
    solve.add_argument("--display-threshold", type=float, default=0.005,
                       help="KL below this renders blank (default %(default)s)")
    solve.add_argument("--out", default=".", help="output directory")
    solve.set_defaults(func=_cmd_solve)

    pareto = subs.add_parser("pareto", help="cost/value frontier over lambda")
    _add_maze_source(pareto)
    pareto.add_argument("--lambdas", type=_lambda_list, required=True,
                        metavar="L1,...,Lk",
                        help="comma-separated cost weights (>= 2 distinct)")
    pareto.add_argument("--probe-state", default="lower-left",
                        help="state to report cost/value at (default lower-left)")
    pareto.add_argument("--horizon", type=int, default=100)
    pareto.add_argument("--iters", type=int, default=200)
    pareto.add_argument("--seed", type=int, default=0)
    pareto.add_argument("--out", default=".", help="output directory")
    pareto.set_defaults(func=_cmd_pareto)

    predictors = subs.add_parser("predictors",
                                 help="per-maze or per-event predictor tables")
    pred_subs = predictors.add_subparsers(dest="experiment", required=True,
                                          parser_class=_Parser)

    exp1 = pred_subs.add_parser("exp1", help="per-maze planning predictors")
    exp1.add_argument("--mazes", required=True, metavar="DIR")
    exp1.add_argument("--out", required=True, metavar="CSV")
    _add_run_flags(exp1)
    exp1.add_argument("--itbr-alpha", type=float, default=100.0,
                      help="bounded-rationality resource (default %(default)s)")
    exp1.add_argument("--turn-samples", type=int, default=100)
    exp1.set_defaults(func=_cmd_predictors_exp1)

    exp2 = pred_subs.add_parser("exp2",
                                help="teleport-event predictors on "
                                     "symmetry-expanded bases")
    exp2.add_argument("--base-mazes", required=True, metavar="DIR")
    exp2.add_argument("--events-per-maze", type=int, default=10, metavar="K")
    exp2.add_argument("--out", required=True, metavar="CSV")
    _add_run_flags(exp2)
    exp2.set_defaults(func=_cmd_predictors_exp2)

    gen = subs.add_parser("gen-mazes", help="random solvable corner mazes")
    gen.add_argument("--width", type=int, default=9)
    gen.add_argument("--height", type=int, default=9)
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--density-low", type=float, default=0.0)
    gen.add_argument("--density-high", type=float, default=0.4)
    gen.add_argument("--out", required=True, metavar="DIR")
    gen.set_defaults(func=_cmd_gen_mazes)

    select = subs.add_parser("select-stimuli",
                             help="pick mazes spanning the cost range")
    select.add_argument("--mazes", required=True, metavar="DIR")
    select.add_argument("--k", type=int, required=True)
    _add_run_flags(select)
    select.add_argument("--out", default=".", help="output directory")
    select.set_defaults(func=_cmd_select_stimuli)

    cluster = subs.add_parser("cluster",
                              help="cluster states by plan similarity")
    _add_maze_source(cluster)
    _add_run_flags(cluster)
    cluster.add_argument("--k", type=int, default=3)
    cluster.add_argument("--out", default=".", help="output directory")
    cluster.set_defaults(func=_cmd_cluster)

    regress = subs.add_parser("regress", help="least squares on CSV columns")
    regress.add_argument("--csv", required=True, metavar="FILE")
    regress.add_argument("--x", required=True, metavar="COL")
    regress.add_argument("--y", required=True, metavar="COL")
    regress.set_defaults(func=_cmd_regress)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (_DataError, MazeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
