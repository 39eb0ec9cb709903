"""Baselines: SOO, its multiple-embedding variants, and uniform random search."""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..embedding import (DeterministicObjective, EvaluationRecord, FixedEmbeddingObjective,
                         _matvec, clip_to_unit_box, project, sample_matrix)
from ..spaces import BoxSpace, RngStream, make_low_space, unit_box
from ._core import CurveRecorder, OptimizerConfig, RunResult, TraceEvent, sqrt_depth, tree_search


def soo(g: Callable[[np.ndarray], float], space: BoxSpace, budget: int, K: int = 3,
        h_max: int | None = None, trace: Callable[[TraceEvent], None] | None = None,
        evaluator=None) -> RunResult:
    """Simultaneous Optimistic Optimization of a deterministic ``g`` on ``space``.

    Each depth contributes its single best leaf per sweep. The middle child
    shares its parent's center and reuses the parent's value instead of
    spending an evaluation on it.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if evaluator is None:
        evaluator = DeterministicObjective(g, space, budget)
    h_max = sqrt_depth(budget) if h_max is None else h_max
    return tree_search(evaluator, space, K, h_max, cap=0.0, by_norm=False,
                       trace=trace, algorithm="soo")


def split_budget(v: int, M: int) -> list[int]:
    """``floor(v/M)`` per search, the remainder spread one each over the first searches."""
    if v < M:
        raise ValueError(f"budget {v} is smaller than the number of searches {M}")
    q, r = divmod(v, M)
    return [q + 1 if s < r else q for s in range(M)]


class _Merged:
    """Concatenates the curves of consecutive searches into one."""

    def __init__(self, algorithm: str):
        self.algorithm = algorithm
        self.curve = CurveRecorder()
        self.best = np.inf
        self.incumbent: EvaluationRecord | None = None
        self.x_best = None
        self.iterations = 0
        self.early = False

    def add(self, run: RunResult, x_best) -> None:
        # best-so-far values of the sub-run suffice to extend the merged curve
        for _, value in run.curve:
            self.curve.add(value)
        self.iterations += run.iterations
        self.early |= run.terminated_early
        if run.best_value < self.best:
            self.best = run.best_value
            self.incumbent = run.incumbent
            self.x_best = x_best

    def result(self) -> RunResult:
        return RunResult(self.algorithm, float(self.best), self.incumbent, self.curve.points,
                         self.curve.n, self.iterations, self.early, None, self.x_best)


def resoo(f, cfg: OptimizerConfig, n: int | None = None) -> RunResult:
    """``M`` independent SOO searches, each on ``y -> f(clip(A_m y))`` for its own matrix."""
    n = f.n if n is None else n
    budgets = split_budget(cfg.budget, cfg.M)
    h_max = cfg.h_max if cfg.h_max is not None else sqrt_depth(cfg.budget // cfg.M)
    space = make_low_space(cfg.d, cfg.eta)
    stream = RngStream.for_purpose(cfg.seed, "resoo")
    merged = _Merged("resoo")
    for b in budgets:
        A = sample_matrix(n, cfg.d, stream)
        run = soo(None, space, b, cfg.K, h_max, evaluator=FixedEmbeddingObjective(f, A, space, b))
        merged.add(run, project(A, run.incumbent.point))
    return merged.result()


def sresoo(f, cfg: OptimizerConfig, n: int | None = None) -> RunResult:
    """``M`` sequential SOO searches over ``(alpha, y) in [-1, 1]^(d+1)``.

    Search ``s`` scores ``f(clip(alpha * x_prev + A_s (beta * y)))`` where
    ``x_prev`` is the best point of the previous search (the origin for the
    first) and ``beta = d / eta`` stretches the unit y-block to the usual
    embedding range.
    """
    n = f.n if n is None else n
    budgets = split_budget(cfg.budget, cfg.M)
    h_max = cfg.h_max if cfg.h_max is not None else sqrt_depth(cfg.budget // cfg.M)
    space = unit_box(cfg.d + 1)
    beta = float(make_low_space(cfg.d, cfg.eta).half_width)
    stream = RngStream.for_purpose(cfg.seed, "sresoo")
    merged = _Merged("sresoo")
    x_prev = np.zeros(n)
    for b in budgets:
        A = sample_matrix(n, cfg.d, stream)
        embed = augmented_embedding(A.entries, x_prev, beta)
        run = soo(lambda z: f(embed(z)), space, b, cfg.K, h_max)
        x_prev = embed(run.incumbent.point)
        merged.add(run, x_prev)
    return merged.result()


def augmented_embedding(entries: np.ndarray, x_prev: np.ndarray, beta: float):
    """Map ``z = (alpha, y)`` to ``clip(alpha * x_prev + A (beta * y))``."""
    x_prev = np.array(x_prev, dtype=np.float64)

    def embed(z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        return clip_to_unit_box(z[0] * x_prev + _matvec(entries, beta * z[1:]))

    return embed


def random_search(f, budget: int, seed: int = 0, n: int | None = None) -> RunResult:
    """Uniform sampling of ``[-1, 1]^n``."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    n = f.n if n is None else n
    gen = RngStream.for_purpose(seed, "random_search").generator(0)
    curve = CurveRecorder()
    best_x = None
    for _ in range(budget):
        x = gen.uniform(-1.0, 1.0, n)
        value = float(f(x))
        if value < curve.best:
            best_x = x
        curve.add(value)
    incumbent = EvaluationRecord(curve.best, None, best_x)
    return RunResult("random_search", curve.best, incumbent, curve.points, curve.n, budget,
                     False, None, best_x)
