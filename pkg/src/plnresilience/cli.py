"""Command-line entry point.

Exit codes: 0 success, 2 domain or usage error, 3 I/O error, 1 aborted sweep.
Results go to standard output; progress and diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .analytic import BETA_0, DomainError, NoCriticalPoint, PlnParams, critical_failure_rate, predict, self_arc_probability
from .failsim import census_components, draw_failure_mask
from .graphgen import GraphFormatError, count_self_and_parallel, generate_graph, load_graph, save_graph, self_loops_at
from .harness import (
    SweepAborted,
    SweepConfig,
    critical_curve_table,
    intact_giant_fraction_table,
    run_sweep,
    surviving_distribution_table,
    write_meta,
    write_table,
)

EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_ABORTED = 1


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(float(text))
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_size(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--alpha", type=float, help="scale parameter")
    group.add_argument("--nodes", type=_positive_int, help="target node count; alpha = ln(n / zeta(beta))")
    return group


def _add_p_grid(parser):
    parser.add_argument("--p", type=float, nargs="+", help="explicit failure probabilities")
    parser.add_argument("--p-min", type=float, default=0.0)
    parser.add_argument("--p-max", type=float)
    parser.add_argument("--p-step", type=float, default=0.1)


def _p_values(args) -> list[float]:
    if args.p is not None:
        return list(args.p)
    if args.p_max is None:
        raise DomainError("give --p or --p-max (with --p-min/--p-step)")
    if not args.p_step > 0:
        raise DomainError("--p-step must be positive")
    grid = np.arange(args.p_min, args.p_max + args.p_step / 2, args.p_step)
    return [float(p) for p in np.round(grid, 10)]


def _params(beta: float, args) -> PlnParams:
    if getattr(args, "max_degree", None) is not None:
        return PlnParams(beta * np.log(args.max_degree), beta)
    if args.alpha is not None:
        return PlnParams(args.alpha, beta)
    return PlnParams.for_size(beta, args.nodes)


def _emit_table(rows, args, command, config, started):
    if args.out in (None, "-"):
        write_table(rows, sys.stdout)
        return
    write_table(rows, args.out)
    meta = write_meta(args.out, command, config, getattr(args, "seed", None), time.time() - started)
    print(f"wrote {args.out} and {meta}", file=sys.stderr)


def _print_pairs(pairs: dict, as_csv: bool):
    if as_csv:
        write_table([pairs], sys.stdout)
        return
    width = max(len(k) for k in pairs)
    for key, value in pairs.items():
        if isinstance(value, float):
            value = repr(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        print(f"{key:<{width}}  {value}")


def cmd_predict(args):
    params = _params(args.beta, args)
    pred = predict(params, args.p)
    out = {
        "beta": params.beta,
        "alpha": params.alpha,
        "max_degree": params.max_degree,
        "p": pred.p,
        "chi": pred.chi,
        "xi": pred.xi,
        "alpha_prime": pred.alpha_prime,
        "beta_prime": pred.beta_prime,
        "expected_orphans": pred.expected_orphans,
        "expected_survivors": pred.expected_survivors,
        "has_giant": pred.has_giant,
    }
    if 2 < params.beta < BETA_0:
        try:
            out["p_critical"] = critical_failure_rate(params)
        except NoCriticalPoint as exc:
            print(f"warning: {exc}", file=sys.stderr)
            out["p_critical"] = float("nan")
    _print_pairs(out, args.csv)


def cmd_critical(args):
    started = time.time()
    if len(args.beta) == 1 and args.out is None:
        print(f"{critical_failure_rate(_params(args.beta[0], args)):.4f}")
        return
    if args.nodes is None:
        rows = [{"beta": b, "alpha": args.alpha, "p_critical": critical_failure_rate(PlnParams(args.alpha, b))}
                for b in args.beta]
    else:
        rows = critical_curve_table(args.beta, args.nodes)
    _emit_table(rows, args, "critical", {"betas": args.beta, "nodes": args.nodes, "alpha": args.alpha}, started)


def cmd_generate(args):
    params = _params(args.beta, args)
    graph = generate_graph(params, args.seed, args.mode)
    save_graph(graph, args.out)
    loops, parallel = count_self_and_parallel(graph)
    summary = {
        "vertices": graph.num_vertices,
        "edges": graph.num_edges,
        "max_degree": int(graph.degree.max()) if graph.num_vertices else 0,
        "self_loops": loops,
        "parallel_edges": parallel,
        "self_loops_at_max_degree_vertex": self_loops_at(graph, 0) if graph.num_vertices else 0,
    }
    if params.beta > 2:
        summary["self_arc_probability"] = self_arc_probability(params)
    _print_pairs(summary, args.csv)


def cmd_simulate(args):
    if not 0 <= args.p <= 1:
        raise DomainError(f"--p must lie in [0, 1], got {args.p}")
    graph = load_graph(args.graph)
    census = census_components(graph, draw_failure_mask(graph.num_vertices, args.p, args.seed))
    out = {
        "num_vertices": census.num_vertices,
        "failed_count": census.failed_count,
        "total_survivors": census.total_survivors,
        "giant_size": census.giant_size,
        "second_size": census.second_size,
        "orphan_count": census.orphan_count,
        "survivors_outside_giant": census.survivors_outside_giant,
        "unorphaned_survivors": census.unorphaned_survivors,
        "giant_fraction_of_survivors": census.giant_fraction_of_survivors,
    }
    _print_pairs(out, args.csv)


def cmd_sweep(args):
    started = time.time()
    config = SweepConfig(
        betas=tuple(args.beta),
        p_values=tuple(_p_values(args)),
        target_nodes=args.nodes,
        replicates=args.replicates,
        base_seed=args.seed,
        histogram_mode=args.mode,
    )
    records = run_sweep(config, workers=args.workers, progress=lambda msg: print(msg, file=sys.stderr))
    _emit_table([r.row() for r in records], args, "sweep", config, started)


def cmd_surviving_dist(args):
    started = time.time()
    params = _params(args.beta, args)
    p_values = _p_values(args)
    rows = surviving_distribution_table(params, p_values, args.seed, args.mode)
    config = {"beta": params.beta, "alpha": params.alpha, "p_values": p_values, "mode": args.mode}
    _emit_table(rows, args, "surviving-dist", config, started)


def cmd_giant_fraction(args):
    started = time.time()
    rows = intact_giant_fraction_table(args.beta, args.nodes, args.replicates, args.seed, args.mode)
    config = {"betas": args.beta, "nodes": args.nodes, "replicates": args.replicates, "mode": args.mode}
    _emit_table(rows, args, "giant-fraction", config, started)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plnres", description="Random-failure resilience of finite power-law networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="post-failure parameters for one (beta, alpha, p)")
    p.add_argument("--beta", type=float, required=True)
    _add_size(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("critical", help="critical failure rate(s)")
    p.add_argument("--beta", type=float, nargs="+", required=True)
    _add_size(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("generate", help="write a configuration-model graph file")
    p.add_argument("--beta", type=float, required=True)
    _add_size(p)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--mode", choices=("deterministic", "stochastic"), default="deterministic")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="fail nodes of a graph file and census the survivors")
    p.add_argument("graph")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="replicated (beta, p) sweep to CSV")
    p.add_argument("--beta", type=float, nargs="+", required=True)
    p.add_argument("--nodes", type=_positive_int, default=100_000)
    _add_p_grid(p)
    p.add_argument("--replicates", type=_positive_int, default=20)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--mode", choices=("deterministic", "stochastic"), default="deterministic")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("surviving-dist", help="analytic vs empirical surviving degree counts")
    p.add_argument("--beta", type=float, required=True)
    group = _add_size(p)
    group.add_argument("--max-degree", type=_positive_int, help="alpha = beta * ln(max_degree)")
    _add_p_grid(p)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--mode", choices=("deterministic", "stochastic"), default="deterministic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_surviving_dist)

    p = sub.add_parser("giant-fraction", help="giant-component fraction of intact graphs")
    p.add_argument("--beta", type=float, nargs="+", required=True)
    p.add_argument("--nodes", type=_positive_int, default=100_000)
    p.add_argument("--replicates", type=_positive_int, default=20)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--mode", choices=("deterministic", "stochastic"), default="deterministic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_giant_fraction)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (GraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SweepAborted as exc:
        print(f"error: sweep aborted: {exc}", file=sys.stderr)
        return EXIT_ABORTED
    except (DomainError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0

