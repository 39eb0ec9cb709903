"""Run every experiment family at desk scale and render the SVG plots.

Usage: python3 scripts/run_desk_suite.py [--output results/desk] [--workers 1]
"""
import argparse
import time
from pathlib import Path

from embhunter.bench import FAMILIES, ExperimentConfig, emit_plot, run_experiment
from embhunter.functions import FUNCTIONS
from embhunter.optimizers import ALGORITHMS


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--output", default="results/desk")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--families", nargs="+", default=sorted(FAMILIES), choices=sorted(FAMILIES))
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    for family in args.families:
        out = Path(args.output) / family
        cfg = ExperimentConfig.profile(family, "desk", functions=list(FUNCTIONS),
                                       algorithms=list(ALGORITHMS), repetitions=args.repetitions,
                                       workers=args.workers, master_seed=args.seed,
                                       output=str(out))
        start = time.perf_counter()
        run_experiment(cfg)
        plots = emit_plot(out / "cells.csv", out)
        print(f"{family}: {len(plots)} plots in {out} ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
