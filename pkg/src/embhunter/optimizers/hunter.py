"""EmbeddedHunter: one optimistic tree over the low space, random embeddings per evaluation."""
from __future__ import annotations

from typing import Callable

from ..embedding import StochasticObjective
from ..spaces import RngStream, make_low_space
from ._core import OptimizerConfig, RunResult, TraceEvent, sqrt_depth, tree_search


def embedded_hunter(f, cfg: OptimizerConfig, n: int | None = None,
                    trace: Callable[[TraceEvent], None] | None = None) -> RunResult:
    """Minimize ``f`` on ``[-1, 1]^n`` through the ``cfg.d``-dimensional space ``[-d/eta, d/eta]^d``.

    Every evaluation of a base point ``y`` draws a new Gaussian matrix ``A``
    and scores ``f(clip(A y))``. A base point may be evaluated again while its
    evaluation count is at most ``M * ||y||``, so the zero vector is evaluated
    exactly once. Leaves are swept depth by depth and, within a depth, by
    decreasing base-point norm; a group's best leaf is expanded only if it
    strictly improves on everything expanded earlier in the sweep.
    """
    n = f.n if n is None else n
    space = make_low_space(cfg.d, cfg.eta)
    stream = RngStream.for_purpose(cfg.seed, "embedded_hunter")
    evaluator = StochasticObjective(f, n, space, stream, cfg.budget)
    h_max = cfg.h_max if cfg.h_max is not None else sqrt_depth(cfg.budget)
    return tree_search(evaluator, space, cfg.K, h_max, cap=cfg.M, by_norm=True,
                       trace=trace, algorithm="embedded_hunter")


def hunt(evaluator, space, K: int = 3, h_max: int = 1, M: float = 5,
         trace: Callable[[TraceEvent], None] | None = None) -> RunResult:
    """EmbeddedHunter over an arbitrary budgeted evaluator.

    Test hook: pass a :class:`~embhunter.embedding.DeterministicObjective` to
    replace the random projection with the identity.
    """
    return tree_search(evaluator, space, K, h_max, cap=M, by_norm=True,
                       trace=trace, algorithm="embedded_hunter")
