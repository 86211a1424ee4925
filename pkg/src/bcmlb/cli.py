"""Command line front end: ``bcmlb {sweep,binpack,timing,bounds}``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .bounds import BoundInputs, bound_table
from .errors import BCMError, ConfigError
from .experiments import (ExperimentConfig, load_config, parse_config_text, run_binpack_bench,
                          run_sweep, run_timing)
from .network import color_edges, generate_connected_graph, round_matrix

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _csv_list(kind):
    def parse(text):
        try:
            return tuple(kind(x) for x in text.split(",") if x.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bcmlb", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="seeded DLB experiment sweep")
    s.add_argument("--config", help="key = value configuration file")
    s.add_argument("--n", type=_csv_list(int), help="node counts, e.g. 16,64,128")
    s.add_argument("--loads-per-node", type=_csv_list(int), help="L/n values, e.g. 10,50,100")
    s.add_argument("--alg", type=_csv_list(str), help="greedy,sorted_greedy")
    s.add_argument("--mobility", type=_csv_list(str), help="full,partial")
    s.add_argument("--iters", type=int, help="fixed DLB iterations (default: until stalled)")
    s.add_argument("--max-iters", type=int, help="iteration cap when --iters is not given")
    s.add_argument("--reps", type=int)
    s.add_argument("--seed", type=int, help="master seed")
    s.add_argument("--density", type=float, help="minimum edge density of random graphs")
    s.add_argument("--out", help="summary CSV path (.runs.csv and .meta.json written alongside)")
    s.add_argument("--track-continuous", action="store_true", default=None)
    s.add_argument("--random-first", action="store_true", default=None,
                   help="first ball of a pair goes to a random node")
    s.add_argument("--traces", help="directory for per-run round traces")

    b = sub.add_parser("binpack", help="Greedy vs SortedGreedy balls-into-bins benchmark")
    b.add_argument("--m", type=_csv_list(int), default=(32, 64, 128, 256, 512, 1024))
    b.add_argument("--bins", type=_csv_list(int), default=(2, 8))
    b.add_argument("--reps", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")

    t = sub.add_parser("timing", help="two-bin runtime of both algorithms")
    t.add_argument("--m", type=int, default=2 ** 13)
    t.add_argument("--reps", type=int, default=100)
    t.add_argument("--warmup", type=int, default=5)
    t.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("bounds", help="print every bound for one instance")
    d.add_argument("--K", type=float, required=True, help="initial discrepancy")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--eps", type=float, default=1.0)
    d.add_argument("--d", type=int, help="matchings per round (default: from a random graph)")
    d.add_argument("--lam", type=float, help="lambda(M) (default: from a random graph)")
    d.add_argument("--delta", type=float, default=3.0)
    d.add_argument("--m", type=int, default=1, help="ball count for the min-weight probability")
    d.add_argument("--l-max", type=float, default=1.0)
    d.add_argument("--seed", type=int, default=0, help="graph seed when d or lam is missing")
    return p


def _sweep(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        "n_list": args.n, "loads_per_node_list": args.loads_per_node, "algorithms": args.alg,
        "mobility": args.mobility, "k": args.iters, "max_iters": args.max_iters,
        "reps": args.reps, "master_seed": args.seed, "density": args.density, "out": args.out,
        "track_continuous": args.track_continuous, "random_first": args.random_first,
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    result = run_sweep(cfg.validate(), trace_dir=args.traces)
    print(f"{'n':>5} {'L/n':>5} {'mobility':>8} {'algorithm':>14} {'final disc':>12} "
          f"{'disc ratio':>11} {'moves':>10} {'S':>10}")
    for s in result.summaries:
        print(f"{s.n:>5} {s.loads_per_node:>5} {s.mobility:>8} {s.algorithm:>14} "
              f"{s.mean['final_disc']:>12.4g} {s.mean['disc_ratio']:>11.4g} "
              f"{s.mean['total_moves']:>10.4g} {s.mean['S']:>10.4g}")
    if cfg.out:
        print(f"wrote {cfg.out}")
    return EXIT_OK


def _binpack(args) -> int:
    rows = run_binpack_bench(args.m, args.bins, args.reps, args.seed, args.out)
    print(f"{'m':>6} {'bins':>5} {'algorithm':>14} {'mean disc':>12} {'std':>12}")
    for r in rows:
        print(f"{r.m:>6} {r.n_bins:>5} {r.algorithm:>14} {r.mean_disc:>12.4g} {r.std_disc:>12.4g}")
    return EXIT_OK


def _timing(args) -> int:
    rep = run_timing(args.m, args.reps, args.warmup, args.seed)
    print(f"m={rep.m} reps={rep.reps}")
    print(f"greedy         {rep.greedy_s * 1e3:10.4f} ms")
    print(f"sorted_greedy  {rep.sorted_greedy_s * 1e3:10.4f} ms")
    print(f"sort overhead  {rep.overhead_s * 1e3:10.4f} ms ({100 * rep.relative_overhead:.2f}%)")
    return EXIT_OK


def _bounds(args) -> int:
    d, lam = args.d, args.lam
    if d is None or lam is None:
        g = generate_connected_graph(args.n, args.seed)
        sched = color_edges(g)
        d = sched.d if d is None else d
        lam = round_matrix(sched, args.n).lam if lam is None else lam
    inp = BoundInputs(K=args.K, n=args.n, eps=args.eps, d=d, lam=lam, delta=args.delta,
                      m=args.m, l_max=args.l_max)
    print(f"K={inp.K:g} n={inp.n} eps={inp.eps:g} d={inp.d} lambda={inp.lam:.6g} "
          f"delta={inp.delta:g} m={inp.m} l_max={inp.l_max:g}")
    for name, value in bound_table(inp):
        print(f"{name:<28} {value:.6g}")
    return EXIT_OK


COMMANDS = {"sweep": _sweep, "binpack": _binpack, "timing": _timing, "bounds": _bounds}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, BCMError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
