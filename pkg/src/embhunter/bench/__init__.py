from .experiment import (CELL_COLUMNS, FAMILIES, SCHEMA_VERSION, SUMMARY_COLUMNS, Cell, CellResult,
                         ExperimentConfig, RegretCurve, run_cell, run_experiment, seeds_for)
from .plot import MalformedCSV, collect_series, emit_plot

__all__ = [
    "CELL_COLUMNS", "FAMILIES", "SCHEMA_VERSION", "SUMMARY_COLUMNS", "Cell", "CellResult",
    "ExperimentConfig", "MalformedCSV", "RegretCurve", "collect_series", "emit_plot", "run_cell",
    "run_experiment", "seeds_for",
]
