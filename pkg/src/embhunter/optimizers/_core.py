from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ..embedding import BudgetExhausted, EvaluationRecord
from ..partition import PartitionTree, TreeNode, select_in_group
from ..spaces import BoxSpace


@dataclass(frozen=True)
class OptimizerConfig:
    """Shared knobs of all optimizers. Defaults match the full-scale experiment profile."""

    budget: int = 10_000
    K: int = 3
    h_max: int | None = None    # None: derived from the budget per algorithm
    M: int = 5
    eta: float = 0.3
    d: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.K < 3 or self.K % 2 == 0:
            raise ValueError(f"K must be an odd integer >= 3, got {self.K}")
        if self.h_max is not None and self.h_max < 1:
            raise ValueError(f"h_max must be >= 1, got {self.h_max}")
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def sqrt_depth(budget: int) -> int:
    """Depth cap equal to the square root of a tree's evaluation budget."""
    return max(1, math.isqrt(budget))


class TraceEvent(NamedTuple):
    t: int
    depth: int
    index: int
    action: str       # "evaluate" | "inherit" | "select" | "expand"
    value: float
    sweep: int


@dataclass
class RunResult:
    algorithm: str
    best_value: float
    incumbent: EvaluationRecord | None
    curve: list[tuple[int, float]]
    evaluations: int
    iterations: int
    terminated_early: bool = False
    tree: PartitionTree | None = field(default=None, repr=False)
    x_best: np.ndarray | None = field(default=None, repr=False)

    def best_x(self) -> np.ndarray:
        """High-dimensional point that produced ``best_value``."""
        if self.x_best is not None:
            return self.x_best
        if self.incumbent is None:
            raise ValueError("run has no incumbent")
        return self.incumbent.high_point()


class CurveRecorder:
    """Best-so-far value after every evaluation."""

    def __init__(self, offset: int = 0, best: float = math.inf):
        self.offset = offset
        self.best = best
        self.points: list[tuple[int, float]] = []
        self.n = 0

    def add(self, value: float) -> None:
        self.n += 1
        if value < self.best:
            self.best = value
        self.points.append((self.offset + self.n, self.best))


def tree_search(evaluator, space: BoxSpace, K: int, h_max: int, cap: float,
                by_norm: bool, trace: Callable[[TraceEvent], None] | None = None,
                algorithm: str = "tree") -> RunResult:
    """Optimistic depth sweep shared by EmbeddedHunter and SOO.

    With ``by_norm`` the leaves of each depth are visited in groups of equal
    base-point norm (largest first) and one node per group may be expanded.
    A child whose base point already has ``count`` evaluations is evaluated
    again only while ``count <= cap * ||y||``; otherwise it keeps its parent's
    f*. ``cap=0`` never re-evaluates, which is SOO's reuse of the center child.
    """
    tree = PartitionTree(space, K)
    ledger = tree.ledger
    curve = CurveRecorder()
    t, sweep = 1, 0

    def emit(node: TreeNode, action: str, value: float) -> None:
        if trace is not None:
            trace(TraceEvent(t, node.depth, node.index, action, value, sweep))

    def evaluate(node: TreeNode) -> None:
        rec = evaluator.evaluate(node.point)
        curve.add(rec.value)
        entry = ledger.record(node.key, rec)
        node.fstar = entry.best
        up = node.parent
        while up is not None and up.key == node.key:
            up.fstar = entry.best
            up = up.parent
        emit(node, "evaluate", rec.value)

    def finish(early: bool) -> RunResult:
        best_key, best_entry = min(ledger.items(), key=lambda kv: kv[1].best)
        return RunResult(algorithm, best_entry.best, best_entry.record, curve.points,
                         evaluator.count, t - 1, early, tree)

    evaluate(tree.root)
    while evaluator.remaining > 0:
        sweep += 1
        nu_min = math.inf
        expanded = False
        level = 0
        while level <= min(tree.depth, h_max):
            groups = tree.norm_groups(level) if by_norm else _single_group(tree, level)
            for group in groups:
                node = select_in_group(group)
                emit(node, "select", node.fstar)
                if not node.fstar < nu_min:
                    continue
                nu_min = node.fstar
                if level >= h_max:
                    continue
                emit(node, "expand", node.fstar)
                expanded = True
                for child in tree.expand(node):
                    count = ledger.count(child.key)
                    if count == 0 or count <= cap * child.norm:
                        try:
                            evaluate(child)
                            continue
                        except BudgetExhausted:
                            pass
                    child.fstar = node.fstar
                    emit(child, "inherit", child.fstar)
                if evaluator.remaining == 0:
                    t += 1
                    return finish(False)
            t += 1
            level += 1
        if not expanded:
            # every leaf sits at h_max: nothing left to refine
            return finish(True)
    return finish(False)


def _single_group(tree: PartitionTree, depth: int):
    leaves = tree.leaves(depth)
    return [leaves] if leaves else []
