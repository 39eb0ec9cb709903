"""Desk-scale convergence curves (regret vs. budget) for the four test functions.

Prints the mean final regret table and writes one SVG per function.
Usage: python3 scripts/figure1_desk.py [--output results/figure1]
"""
import argparse

from embhunter.bench import ExperimentConfig, emit_plot, run_experiment
from embhunter.functions import FUNCTIONS
from embhunter.optimizers import ALGORITHMS


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--output", default="results/figure1")
    p.add_argument("--budgets", nargs="+", type=int, default=[100, 500, 2000])
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    cfg = ExperimentConfig.profile("convergence", "desk", swept=args.budgets,
                                   functions=list(FUNCTIONS), algorithms=list(ALGORITHMS),
                                   repetitions=args.repetitions, workers=args.workers,
                                   output=args.output)
    curves, _ = run_experiment(cfg)
    print(f"{'function':15s} {'algorithm':16s} " + " ".join(f"v={v:<10d}" for v in args.budgets))
    table = {(c.function, c.algorithm, c.swept_value): c.mean for c in curves}
    for fn in FUNCTIONS:
        for alg in ALGORITHMS:
            cells = " ".join(f"{table[(fn, alg, v)]:<12.4g}" for v in args.budgets)
            print(f"{fn:15s} {alg:16s} {cells}")
    for path in emit_plot(f"{args.output}/cells.csv", args.output):
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
