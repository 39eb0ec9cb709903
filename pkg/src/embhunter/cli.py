"""Command line entry point: ``embhunter {run,experiment,theory-check,plot}``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .bench import ExperimentConfig, FAMILIES, emit_plot, run_experiment
from .functions import FUNCTIONS, estimate_lipschitz, make_function, make_linear, regret
from .optimizers import ALGORITHMS, OptimizerConfig, run_algorithm
from .theorychecks import jl_check, matrix_norm_check, reports_to_csv, theorem1_check


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", "-v", type=int, help="evaluation budget v")
    p.add_argument("--n", type=int, help="explicit dimension n")
    p.add_argument("--d", type=int, help="search (low) dimension d")
    p.add_argument("--M", type=int, help="embedding number / evaluation-cap factor")
    p.add_argument("--eta", type=float, help="low-space bound parameter in (0, 1)")
    p.add_argument("--K", type=int, help="odd partition factor")


def cmd_run(args) -> int:
    d = args.d or 10
    f = make_function(args.function, args.d_eff or d, args.n or 10_000, args.function_seed)
    cfg = OptimizerConfig(budget=args.budget or 10_000, K=args.K or 3, h_max=args.h_max,
                          M=args.M or 5, eta=args.eta or 0.3, d=d, seed=args.seed)
    result = run_algorithm(args.algorithm, f, cfg)
    print(f"algorithm        {result.algorithm}")
    print(f"function         {f.name} (n={f.n}, d_eff={f.d_eff})")
    print(f"best value       {result.best_value!r}")
    print(f"regret           {regret(f, result.best_value)!r}")
    print(f"evaluations      {result.evaluations}")
    print(f"iterations       {result.iterations}")
    if result.terminated_early:
        print("note             search space exhausted before the budget")
    if args.curve:
        with open(args.curve, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["evaluations", "best_value", "regret"])
            for i, b in result.curve:
                w.writerow([i, repr(b), repr(regret(f, b))])
    if args.tree_dump:
        if result.tree is None:
            print("no tree to dump for this algorithm", file=sys.stderr)
            return 2
        with open(args.tree_dump, "w", newline="") as fh:
            result.tree.dump_csv(fh)
    return 0


def cmd_experiment(args) -> int:
    overrides = dict(v=args.budget, n=args.n, d=args.d, M=args.M, eta=args.eta, K=args.K,
                     repetitions=args.repetitions, master_seed=args.seed, output=args.output,
                     workers=args.workers, record_timing=args.timing or None,
                     functions=args.functions, algorithms=args.algorithms,
                     swept=args.swept)
    if args.config:
        cfg = ExperimentConfig.from_file(args.config, **overrides)
    else:
        cfg = ExperimentConfig.profile(args.family, args.scale, **overrides)
    curves, results = run_experiment(cfg)
    skipped = sum(r.skipped for r in results)
    for c in sorted(curves, key=lambda c: (c.function, c.algorithm, c.swept_value)):
        print(f"{c.function:15s} {c.algorithm:16s} {cfg.swept_name}={c.swept_value:<8g} "
              f"mean regret {c.mean:.6g} (+/- {c.std_error:.2g}, {len(c.regrets)} reps)")
    print(f"wrote {Path(cfg.output) / 'cells.csv'} ({len(results)} cells, {skipped} skipped)")
    if args.plot:
        for path in emit_plot(Path(cfg.output) / "cells.csv", cfg.output):
            print(f"wrote {path}")
    return 0


def cmd_theory(args) -> int:
    trials = args.trials
    reports = []
    lin = make_linear(2.0, 50)
    for norm in (0.0, 0.5, 1.0, 5.0):
        y = np.zeros(5)
        y[0] = norm
        reports.append(theorem1_check(lin, 2.0, y, trials, args.seed))
    ack = make_function("ackley", 2, 50, args.seed)
    L = estimate_lipschitz(ack, args.lipschitz_samples, args.seed)
    reports.append(theorem1_check(ack, L, np.array([1.0, 0.0]), trials, args.seed, estimated=True))
    for n, d in ((1, 1), (10, 10), (100, 10), (1000, 10)):
        reports.append(matrix_norm_check(n, d, max(30, trials // 50), args.seed))
    for r in reports:
        print(r.line())
    pts = np.random.default_rng(args.seed).uniform(-1, 1, (5, 3))
    frac = jl_check(pts, 120, 0.5, max(100, trials // 10), args.seed)
    print(f"[INFO] distance preservation m=5 d=3 n=120 eps=0.5: success fraction {frac:.3f}")
    if args.output:
        Path(args.output).write_text(reports_to_csv(reports))
        print(f"wrote {args.output}")
    return 0 if all(r.passed for r in reports) else 1


def cmd_plot(args) -> int:
    for path in emit_plot(args.csv, args.output):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embhunter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one optimizer on one test function")
    p.add_argument("--algorithm", "-a", choices=ALGORITHMS, default="embedded_hunter")
    p.add_argument("--function", "-f", choices=FUNCTIONS, default="ellipsoid")
    _add_optimizer_flags(p)
    p.add_argument("--d-eff", type=int, help="true effective dimension (defaults to d)")
    p.add_argument("--h-max", type=int, help="maximum expansion depth")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--function-seed", type=int, default=0)
    p.add_argument("--curve", help="write the best-so-far curve to this CSV")
    p.add_argument("--tree-dump", help="write the partition tree to this CSV")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="run an experiment family")
    p.add_argument("--config", help="JSON file with ExperimentConfig keys")
    p.add_argument("--family", choices=sorted(FAMILIES), default="convergence")
    p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    _add_optimizer_flags(p)
    p.add_argument("--repetitions", type=int)
    p.add_argument("--functions", nargs="+", choices=FUNCTIONS)
    p.add_argument("--algorithms", nargs="+", choices=ALGORITHMS)
    p.add_argument("--swept", nargs="+", type=int, help="override the swept values")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--output", "-o", help="output directory")
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")
    p.add_argument("--plot", action="store_true", help="also render SVG plots")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("theory-check", help="Monte-Carlo checks of the embedding bounds")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--lipschitz-samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="write the reports as CSV")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("plot", help="render SVG plots from a cells.csv")
    p.add_argument("csv")
    p.add_argument("--output", "-o", default=".")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
