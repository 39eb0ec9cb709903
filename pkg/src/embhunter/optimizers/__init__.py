from ._core import OptimizerConfig, RunResult, TraceEvent, sqrt_depth, tree_search
from .comparators import random_search, resoo, soo, split_budget, sresoo
from .hunter import embedded_hunter, hunt

ALGORITHMS = ("embedded_hunter", "resoo", "sresoo", "random_search")


def run_algorithm(name: str, f, cfg: OptimizerConfig) -> RunResult:
    """Dispatch an optimizer by name on a high-dimensional objective."""
    if name == "embedded_hunter":
        return embedded_hunter(f, cfg)
    if name == "resoo":
        return resoo(f, cfg)
    if name == "sresoo":
        return sresoo(f, cfg)
    if name == "random_search":
        return random_search(f, cfg.budget, cfg.seed)
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


__all__ = [
    "ALGORITHMS", "OptimizerConfig", "RunResult", "TraceEvent", "embedded_hunter", "hunt",
    "random_search", "resoo", "run_algorithm", "soo", "split_budget", "sqrt_depth", "sresoo",
    "tree_search",
]
