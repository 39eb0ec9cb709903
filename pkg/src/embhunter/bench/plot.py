"""Mean-regret plots from a cells CSV, one SVG per (family, function)."""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiment import CELL_COLUMNS  # noqa: E402


class MalformedCSV(ValueError):
    pass


def collect_series(csv_path) -> dict[tuple[str, str], dict[str, list[tuple[float, float]]]]:
    """Mean final regret per swept value, keyed by (family, function) then algorithm."""
    return _read_cells(csv_path)[0]


def _read_cells(csv_path):
    sums: dict = defaultdict(lambda: defaultdict(lambda: defaultdict(list)))
    swept_names: dict = {}
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CELL_COLUMNS:
            raise MalformedCSV(f"row 1: expected header {','.join(CELL_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CELL_COLUMNS):
                raise MalformedCSV(f"row {lineno}: expected {len(CELL_COLUMNS)} fields, got {len(row)}")
            rec = dict(zip(CELL_COLUMNS, row))
            if rec["final_regret"] == "":
                continue  # skipped cell
            try:
                x = float(rec["swept_value"])
                r = float(rec["final_regret"])
            except ValueError as exc:
                raise MalformedCSV(f"row {lineno}: {exc}") from None
            if not r >= 0.0:
                raise MalformedCSV(f"row {lineno}: negative or NaN regret {r}")
            key = (rec["family"], rec["function"])
            swept_names[key] = rec["swept_name"]
            sums[key][rec["algorithm"]][x].append(r)
    series = {}
    for key, algs in sums.items():
        series[key] = {alg: sorted((x, sum(v) / len(v)) for x, v in pts.items())
                       for alg, pts in algs.items()}
    return series, swept_names


def _geometric(xs) -> bool:
    return min(xs) > 0 and max(xs) / min(xs) >= 10


def emit_plot(csv_path, output_dir) -> list[Path]:
    """Write ``<family>_<function>.svg`` files and return their paths."""
    series, names = _read_cells(csv_path)
    if not series:
        raise MalformedCSV(f"{csv_path}: no completed cells to plot")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    with plt.rc_context({"svg.fonttype": "none", "svg.hashsalt": "embhunter"}):
        for (family, function), algs in sorted(series.items()):
            fig, ax = plt.subplots(figsize=(5, 3.6))
            xs, ys = [], []
            for alg in sorted(algs):
                pts = algs[alg]
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=alg)
                xs += [p[0] for p in pts]
                ys += [p[1] for p in pts]
            if _geometric(xs):
                ax.set_xscale("log")
            if min(ys) > 0 and max(ys) / min(ys) >= 10:
                ax.set_yscale("log")
            elif max(ys) > 0 and math.isfinite(max(ys)):
                ax.set_yscale("symlog", linthresh=max(min((y for y in ys if y > 0), default=1e-12), 1e-12))
            ax.set_xlabel(names[(family, function)])
            ax.set_ylabel("mean final regret")
            ax.set_title(f"{family}: {function}")
            ax.legend()
            fig.tight_layout()
            path = out / f"{family}_{function}.svg"
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            paths.append(path)
    return paths
