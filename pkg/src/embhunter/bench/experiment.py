"""Experiment grid runner writing per-cell and aggregated regret CSVs."""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..functions import CountingObjective, make_function, regret
from ..optimizers import ALGORITHMS, OptimizerConfig, run_algorithm
from ..spaces import stable_id

SCHEMA_VERSION = 1
CELL_COLUMNS = ["family", "function", "algorithm", "swept_name", "swept_value", "repetition",
                "seed", "evaluations_used", "final_regret", "wall_time_ms"]
SUMMARY_COLUMNS = ["family", "function", "algorithm", "swept_name", "swept_value",
                   "repetitions", "mean_regret", "std_error"]

FAMILIES = {
    # family: (swept parameter, paper sweep, desk sweep)
    "convergence": ("v", [10, 50, 100, 1000, 10_000, 50_000, 100_000], [100, 500, 2000]),
    "scalability": ("n", [100, 500, 1000, 10_000, 50_000, 100_000], [100, 500, 1000]),
    "embedding_number": ("M", [1, 2, 5, 8, 10, 20], [1, 2, 5, 10]),
    "effective_dimension": ("d", [2, 5, 10, 20, 50, 75], [2, 5, 10]),
    "dimension_mismatch": ("d_eff", [2, 5, 8, 25, 75, 250], [2, 5, 8, 25]),
}

PAPER_DEFAULTS = dict(v=10_000, n=10_000, d=10, M=5, eta=0.3, K=3, repetitions=20)
DESK_DEFAULTS = dict(v=2000, n=1000, d=5, M=5, eta=0.3, K=3, repetitions=10)


@dataclass
class ExperimentConfig:
    family: str = "convergence"
    swept: list = field(default_factory=lambda: list(FAMILIES["convergence"][2]))
    v: int = DESK_DEFAULTS["v"]
    n: int = DESK_DEFAULTS["n"]
    d: int = DESK_DEFAULTS["d"]
    M: int = DESK_DEFAULTS["M"]
    eta: float = DESK_DEFAULTS["eta"]
    K: int = DESK_DEFAULTS["K"]
    repetitions: int = DESK_DEFAULTS["repetitions"]
    functions: list = field(default_factory=lambda: ["ellipsoid"])
    algorithms: list = field(default_factory=lambda: ["embedded_hunter", "resoo", "sresoo"])
    master_seed: int = 0
    output: str = "results"
    workers: int = 1
    record_timing: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if not self.swept:
            raise ValueError("swept values must not be empty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")

    @property
    def swept_name(self) -> str:
        return FAMILIES[self.family][0]

    @classmethod
    def profile(cls, family: str, scale: str = "desk", **overrides) -> "ExperimentConfig":
        """Full-scale defaults (``scale="paper"``) or the reduced desk profile."""
        if scale not in ("desk", "paper"):
            raise ValueError("scale must be 'desk' or 'paper'")
        base = dict(PAPER_DEFAULTS if scale == "paper" else DESK_DEFAULTS)
        sweep = FAMILIES[family][1 if scale == "paper" else 2]
        base.update(family=family, swept=list(sweep))
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        """Load a JSON object whose keys are field names; ``scale`` picks the base profile."""
        data = json.loads(Path(path).read_text())
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)} - {"scale"}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        scale = data.pop("scale", "desk")
        family = data.pop("family", "convergence")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.profile(family, scale, **data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Cell:
    family: str
    function: str
    algorithm: str
    swept_value: float
    repetition: int

    def settings(self, cfg: ExperimentConfig) -> dict:
        """Effective (v, n, d, d_eff, M) for this cell."""
        s = dict(v=cfg.v, n=cfg.n, d=cfg.d, M=cfg.M)
        name = cfg.swept_name
        if name == "d_eff":
            s["d_eff"] = int(self.swept_value)
        else:
            s[name] = int(self.swept_value)
            s["d_eff"] = s["d"]
        return s


@dataclass
class CellResult:
    cell: Cell
    seed: int
    evaluations: int | None
    final_regret: float | None
    wall_time_ms: float | None
    reason: str = ""

    @property
    def skipped(self) -> bool:
        return self.final_regret is None


@dataclass
class RegretCurve:
    algorithm: str
    function: str
    swept_value: float
    regrets: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.regrets))

    @property
    def std_error(self) -> float:
        if len(self.regrets) < 2:
            return 0.0
        return float(np.std(self.regrets, ddof=1) / math.sqrt(len(self.regrets)))


def seeds_for(master: int, cell: Cell) -> tuple[int, int]:
    """``(function seed, algorithm seed)`` of a cell.

    Seeds ignore the swept value, so every point of a sweep sees the same
    function instance and random numbers (common random numbers); they never
    depend on execution order.
    """
    fseed = stable_id(master, "function", cell.function, cell.repetition)
    aseed = stable_id(master, "algorithm", cell.function, cell.algorithm, cell.repetition)
    return fseed, aseed


def run_cell(cfg: ExperimentConfig, cell: Cell) -> CellResult:
    s = cell.settings(cfg)
    fseed, aseed = seeds_for(cfg.master_seed, cell)
    if s["d_eff"] > s["n"]:
        return CellResult(cell, aseed, None, None, None, "d_eff exceeds n")
    if cell.algorithm in ("resoo", "sresoo") and s["v"] < s["M"]:
        return CellResult(cell, aseed, None, None, None, "budget below M")
    f = CountingObjective(make_function(cell.function, s["d_eff"], s["n"], fseed))
    opt = OptimizerConfig(budget=s["v"], K=cfg.K, M=s["M"], eta=cfg.eta, d=s["d"], seed=aseed)
    start = time.perf_counter()
    result = run_algorithm(cell.algorithm, f, opt)
    elapsed = (time.perf_counter() - start) * 1e3
    if f.calls != result.evaluations:
        raise RuntimeError(f"{cell}: optimizer reported {result.evaluations} evaluations "
                           f"but the objective saw {f.calls}")
    return CellResult(cell, aseed, f.calls, regret(f, result.best_value),
                      elapsed if cfg.record_timing else None)


def cells(cfg: ExperimentConfig) -> list[Cell]:
    return [Cell(cfg.family, fn, alg, value, rep)
            for fn in cfg.functions
            for alg in cfg.algorithms
            for value in cfg.swept
            for rep in range(cfg.repetitions)]


def _run_one(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> tuple[list[RegretCurve], list[CellResult]]:
    """Run every cell of the grid and aggregate final regrets per curve point."""
    todo = cells(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_one, [(cfg, c) for c in todo]))
    else:
        results = [run_cell(cfg, c) for c in todo]
    curves = aggregate(results)
    if write:
        write_outputs(cfg, results, curves)
    return curves, results


def aggregate(results: list[CellResult]) -> list[RegretCurve]:
    grouped: dict[tuple, list[float]] = {}
    for r in results:
        if r.skipped:
            continue
        key = (r.cell.function, r.cell.algorithm, r.cell.swept_value)
        grouped.setdefault(key, []).append(r.final_regret)
    return [RegretCurve(alg, fn, value, regs) for (fn, alg, value), regs in grouped.items()]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_outputs(cfg: ExperimentConfig, results: list[CellResult], curves: list[RegretCurve]) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "cells.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CELL_COLUMNS)
        for r in sorted(results, key=lambda r: _cell_order(cfg, r.cell)):
            c = r.cell
            w.writerow([c.family, c.function, c.algorithm, cfg.swept_name, _fmt(c.swept_value),
                        c.repetition, r.seed, _fmt(r.evaluations), _fmt(r.final_regret),
                        "" if r.wall_time_ms is None else f"{r.wall_time_ms:.3f}"])
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        order = lambda c: (cfg.functions.index(c.function), cfg.algorithms.index(c.algorithm),
                           cfg.swept.index(c.swept_value))
        for c in sorted(curves, key=order):
            w.writerow([cfg.family, c.function, c.algorithm, cfg.swept_name, _fmt(c.swept_value),
                        len(c.regrets), _fmt(c.mean), _fmt(c.std_error)])
    meta = {"schema_version": SCHEMA_VERSION, "config": cfg.to_dict()}
    (out / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out


def _cell_order(cfg: ExperimentConfig, cell: Cell):
    return (cfg.functions.index(cell.function), cfg.algorithms.index(cell.algorithm),
            cfg.swept.index(cell.swept_value), cell.repetition)
