"""Random Gaussian embeddings of the low space into ``[-1, 1]^n``.

A low point ``y`` is mapped to ``clip(A @ y, -1, 1)`` where ``A`` is an
``n x d`` matrix with i.i.d. ``N(0, 1/n)`` entries. Every matrix is identified
by a :class:`MatrixTag` so that it can be regenerated bit-exactly instead of
stored.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spaces import BoxSpace, RngStream

# Rows generated per block when streaming ``A @ y`` without materializing A.
ROW_BLOCK = 4096


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested after the budget is spent."""


@dataclass(frozen=True)
class MatrixTag:
    """Provenance of a sampled matrix: enough to regenerate it exactly."""

    seed: int
    stream_id: int
    draw_index: int
    n: int
    d: int

    def stream(self) -> RngStream:
        return RngStream(self.seed, self.stream_id)


@dataclass(frozen=True)
class GaussianMatrix:
    tag: MatrixTag
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.tag.n

    @property
    def d(self) -> int:
        return self.tag.d


def _gaussian_rows(gen: np.random.Generator, n: int, d: int):
    """Yield consecutive row blocks of an ``n x d`` N(0, 1/n) matrix."""
    scale = 1.0 / np.sqrt(n)
    for start in range(0, n, ROW_BLOCK):
        rows = min(ROW_BLOCK, n - start)
        yield gen.standard_normal((rows, d)) * scale


def _matvec(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    # Column accumulation in fixed order: the result for a row does not
    # depend on how many rows are in the block, unlike a BLAS gemv.
    out = a[:, 0] * y[0]
    for j in range(1, a.shape[1]):
        out = out + a[:, j] * y[j]
    return out


def sample_matrix(n: int, d: int, stream: RngStream, draw_index: int | None = None) -> GaussianMatrix:
    """Draw an ``n x d`` matrix with i.i.d. N(0, 1/n) entries.

    Without ``draw_index`` the stream advances; with it, that draw is
    regenerated and the stream position is left alone.
    """
    if n < 1 or d < 1:
        raise ValueError(f"matrix shape must be positive, got {n}x{d}")
    if draw_index is None:
        draw_index, gen = stream.next_generator()
    else:
        gen = stream.generator(draw_index)
    entries = np.concatenate(list(_gaussian_rows(gen, n, d)), axis=0)
    entries.setflags(write=False)
    return GaussianMatrix(MatrixTag(stream.seed, stream.stream_id, draw_index, n, d), entries)


def clip_to_unit_box(x: np.ndarray) -> np.ndarray:
    return np.clip(x, -1.0, 1.0)


def project(a: GaussianMatrix | np.ndarray, y) -> np.ndarray:
    """Euclidean projection ``clip(A y)`` of a low point into ``[-1, 1]^n``."""
    entries = a.entries if isinstance(a, GaussianMatrix) else np.asarray(a, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if entries.ndim != 2 or entries.shape[1] != y.shape[0]:
        raise ValueError(f"cannot project a {y.shape[0]}-vector with a {entries.shape} matrix")
    return clip_to_unit_box(_matvec(entries, y))


def project_tagged(tag: MatrixTag, y, clip: bool = True) -> np.ndarray:
    """Compute ``A y`` for the matrix named by ``tag``, streaming its rows.

    Peak memory is one row block, so this is the path used when ``n`` is
    large. The result is bit-identical to ``project(sample_matrix(...), y)``.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != tag.d:
        raise ValueError(f"expected a {tag.d}-vector, got {y.shape[0]}")
    gen = tag.stream().generator(tag.draw_index)
    out = np.empty(tag.n)
    start = 0
    for block in _gaussian_rows(gen, tag.n, tag.d):
        out[start:start + block.shape[0]] = _matvec(block, y)
        start += block.shape[0]
    return clip_to_unit_box(out) if clip else out


@dataclass(frozen=True)
class EvaluationRecord:
    value: float
    tag: MatrixTag | None
    point: np.ndarray

    def high_point(self) -> np.ndarray:
        """Reconstruct the evaluated point of ``[-1, 1]^n``."""
        if self.tag is None:
            return np.array(self.point, dtype=np.float64)
        return project_tagged(self.tag, self.point)


class StochasticObjective:
    """The random function ``g(y) = f(clip(A y))`` with a fresh A per call.

    Owns the evaluation counter; once ``budget`` calls have been made every
    further call raises :class:`BudgetExhausted` without touching ``f``.
    """

    def __init__(self, f: Callable[[np.ndarray], float], n: int, space: BoxSpace,
                 stream: RngStream, budget: int):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.f = f
        self.n = n
        self.space = space
        self.stream = stream
        self.budget = budget
        self.count = 0

    @property
    def remaining(self) -> int:
        return self.budget - self.count

    def evaluate(self, y) -> EvaluationRecord:
        if self.count >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations spent")
        y = np.array(y, dtype=np.float64).reshape(-1)
        draw_index, _ = self.stream.next_generator()
        tag = MatrixTag(self.stream.seed, self.stream.stream_id, draw_index, self.n, self.space.dim)
        x = project_tagged(tag, y)
        self.count += 1
        return EvaluationRecord(float(self.f(x)), tag, y)

    def replay(self, record: EvaluationRecord) -> float:
        """Re-evaluate ``f`` at a record's projected point (not counted)."""
        return float(self.f(record.high_point()))


class DeterministicObjective:
    """Budgeted evaluator of a fixed function on the low space.

    Stands in for :class:`StochasticObjective` when the projection is the
    identity (``d == n``) or fixed, e.g. inside SOO or for trace tests.
    """

    def __init__(self, g: Callable[[np.ndarray], float], space: BoxSpace, budget: int):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.g = g
        self.space = space
        self.budget = budget
        self.count = 0

    @property
    def remaining(self) -> int:
        return self.budget - self.count

    def evaluate(self, y) -> EvaluationRecord:
        if self.count >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations spent")
        y = np.array(y, dtype=np.float64).reshape(-1)
        self.count += 1
        return EvaluationRecord(float(self.g(y)), None, y)


class FixedEmbeddingObjective(DeterministicObjective):
    """Budgeted ``y -> f(clip(A y))`` for one sampled matrix ``A``."""

    def __init__(self, f: Callable[[np.ndarray], float], matrix: GaussianMatrix,
                 space: BoxSpace, budget: int):
        super().__init__(lambda y: f(project(matrix, y)), space, budget)
        self.matrix = matrix

    def evaluate(self, y) -> EvaluationRecord:
        rec = super().evaluate(y)
        return EvaluationRecord(rec.value, self.matrix.tag, rec.point)


def evaluate_stochastic(g: StochasticObjective, y) -> EvaluationRecord:
    """One evaluation of ``g`` at ``y`` under a freshly sampled matrix."""
    return g.evaluate(y)
