"""``netrank`` command line.

Every subcommand reads optional settings from ``--config`` (a JSON or YAML
mapping with :class:`~netrank.experiments.ExperimentSpec` fields) and then
applies flag overrides on top.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import io
from .dynamics import add_observation_noise, generate_er_network, map_from_params, simulate
from .errors import NetrankError, ParameterError
from .evaluation import confusion, correlation_baseline, roc_auc, threshold_adjacency, tpr_fpr
from .experiments import (
    ENGINES,
    ExperimentSpec,
    aggregate,
    bench_scaling,
    load_config,
    run_experiment,
    run_seeds,
    write_records,
    write_summary,
)
from .ranking import ForestConfig, RelieffConfig, rank_all_nodes

log = logging.getLogger("netrank")


def _common(p: argparse.ArgumentParser, grids: bool = True):
    p.add_argument("--config", type=Path, help="JSON/YAML file with experiment settings")
    nargs = "+" if grids else None
    p.add_argument("--n", type=int, nargs=nargs, help="network size(s)")
    p.add_argument("--eps", type=float, nargs=nargs, help="coupling strength(s)")
    p.add_argument("--length", type=int, nargs=nargs, help="time series length(s)")
    p.add_argument("--sigma", type=float, nargs=nargs, help="observation noise level(s)")
    p.add_argument("--engine", nargs=nargs, help=f"ranking engine(s): {', '.join(ENGINES)}")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", type=Path, help="output file")
    p.add_argument("--map", choices=("logistic", "ikeda"), help="local map")
    p.add_argument("--map-param", type=float, help="r for logistic, u for ikeda")
    p.add_argument("--rho", type=float, help="link probability")
    p.add_argument("--transient", type=int, help="discarded initial steps")
    p.add_argument("--n-trees", type=int, help="forest size")
    p.add_argument("--k-neighbors", type=int, help="RReliefF neighbours")
    p.add_argument("--importance-mode", choices=("impurity", "permutation"))


def _spec(args) -> ExperimentSpec:
    d = load_config(args.config) if args.config else {}
    spec = ExperimentSpec.from_dict(d)
    over = {}
    for flag, key in (("n", "n"), ("eps", "eps"), ("length", "l"), ("sigma", "sigma"),
                      ("engine", "engines"), ("seed", "seed"), ("rho", "rho"),
                      ("transient", "transient"), ("n_trees", "n_trees"),
                      ("k_neighbors", "k_neighbors"), ("importance_mode", "importance_mode"),
                      ("realizations", "realizations"), ("workers", "workers")):
        v = getattr(args, flag, None)
        if v is not None:
            over[key] = v
    if args.out is not None:
        over["out"] = str(args.out)
    if args.map is not None or args.map_param is not None:
        kind = args.map or spec.map.get("kind", "logistic")
        m = {"kind": kind}
        if args.map_param is not None:
            m["r" if kind == "logistic" else "u"] = args.map_param
        elif kind == spec.map.get("kind", "logistic"):
            m = dict(spec.map)
        over["map"] = m
    return replace(spec, **over) if over else spec


def _single(spec: ExperimentSpec, name: str):
    values = getattr(spec, name)
    if len(values) != 1:
        raise ParameterError(f"this command takes a single {name} value, got {list(values)}")
    return values[0]


def _out(spec: ExperimentSpec, default: str) -> Path:
    return Path(spec.out or default)


def cmd_simulate(args) -> int:
    spec = _spec(args)
    n, eps, l, sigma = (_single(spec, k) for k in ("n", "eps", "l", "sigma"))
    seeds = run_seeds(spec.seed, spec.map, n, eps, l, sigma, spec.rho, spec.transient,
                      args.realization, "")
    adj = generate_er_network(n, spec.rho, seeds["graph_seed"])
    panel = simulate(adj, map_from_params(spec.map), eps, l, spec.transient, seeds["init_seed"])
    if sigma > 0:
        panel = add_observation_noise(panel, sigma, seeds["noise_seed"])
    out = _out(spec, "panel.csv")
    adj_out = args.adjacency_out or out.with_name(out.stem + ".adj.txt")
    io.write_panel(out, panel)
    io.write_adjacency(adj_out, adj)
    print(f"wrote {out} ({n} nodes x {l} steps) and {adj_out} ({adj.n_links} links)")
    return 0


def cmd_rank(args) -> int:
    spec = _spec(args)
    engine = _single(spec, "engines")
    panel = io.read_panel(args.panel)
    if engine == "forest":
        f = rank_all_nodes(panel, ForestConfig(n_trees=spec.n_trees, seed=spec.seed,
                                               importance_mode=spec.importance_mode),
                           workers=spec.workers)
    elif engine == "relieff":
        f = rank_all_nodes(panel, RelieffConfig(k_neighbors=spec.k_neighbors, seed=spec.seed),
                           workers=spec.workers)
    else:
        f = correlation_baseline(panel)
    out = _out(spec, "importance.csv")
    io.write_importance(out, f)
    print(f"wrote {out}")
    return 0


def cmd_evaluate(args) -> int:
    f = io.read_importance(args.importance)
    adj = io.read_adjacency(args.adjacency)
    roc = roc_auc(f, adj)
    out = Path(args.out or "roc.csv")
    io.write_roc(out, roc)
    print(f"auc {roc.auc:.6f}")
    if args.theta is not None:
        c = confusion(adj, threshold_adjacency(f, args.theta))
        c_out = out.with_name(out.stem + ".confusion.csv")
        io.write_confusion(c_out, c)
        tpr, fpr = tpr_fpr(c)
        print(f"theta {args.theta}: tp={c.tp} fp={c.fp} fn={c.fn} tn={c.tn} tpr={tpr:.4f} fpr={fpr:.4f}")
    return 0


def _fmt_cell(v) -> str:
    return f"{v:.4f}" if isinstance(v, float) else str(v)


def cmd_sweep(args) -> int:
    spec = _spec(args)
    records = run_experiment(spec)
    out = _out(spec, "records.csv")
    write_records(out, records)
    rows = aggregate(records)
    summary = out.with_name(out.stem + ".summary.csv")
    write_summary(summary, rows)
    cols = ["n", "eps", "l", "sigma", "engine", "runs", "failed", "auc_mean", "auc_std", "corr_mean"]
    print("\t".join(cols))
    for row in rows:
        print("\t".join(_fmt_cell(row[c]) for c in cols))
    print(f"wrote {out} and {summary}")
    return 0


def cmd_bench(args) -> int:
    given = load_config(args.config) if args.config else {}
    spec = _spec(args)
    n_grid = list(spec.n) if (args.n or "n" in given) else [12, 25, 50]
    length = spec.l[0] if (args.length or "l" in given) else 200
    engines = list(spec.engines)
    rows, slopes = bench_scaling(n_grid, length, engines, seed=spec.seed, eps=spec.eps[0],
                                 n_trees=spec.n_trees, k_neighbors=spec.k_neighbors,
                                 repeats=args.repeats)
    lines = ["n,engine,seconds"] + [f"{r['n']},{r['engine']},{r['seconds']:.6f}" for r in rows]
    for name, s in slopes.items():
        lines.append(f"# slope,{name},{s:.4f}")
    text = "\n".join(lines) + "\n"
    if spec.out:
        Path(spec.out).write_text(text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netrank", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a network and its trajectories")
    _common(p, grids=False)
    p.add_argument("--realization", type=int, default=0)
    p.add_argument("--adjacency-out", type=Path)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rank", help="score every ordered node pair of a panel")
    _common(p, grids=False)
    p.add_argument("--panel", type=Path, required=True)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="ROC/AUC of an importance matrix against the truth")
    _common(p, grids=False)
    p.add_argument("--importance", type=Path, required=True)
    p.add_argument("--adjacency", type=Path, required=True)
    p.add_argument("--theta", type=float, help="also write confusion counts at this threshold")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="run a parameter grid and aggregate AUCs")
    _common(p)
    p.add_argument("--realizations", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="ranking wall time versus network size")
    _common(p)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NetrankError, OSError, ValueError) as exc:
        print(f"netrank {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
