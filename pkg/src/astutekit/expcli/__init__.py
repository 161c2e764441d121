"""Experiment harness: declarative configs in, CSV tables and SVG plots out."""

from .config import ExperimentConfig, parse_config, parse_config_text, serialize_config
from .runner import (
    ResultRow,
    run_conditions,
    run_convergence,
    run_histogram_demo,
    run_lower_bound,
    rows_to_csv,
    rows_from_csv,
)
from .svgplot import PlotLayout, emit_plot

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "parse_config_text",
    "serialize_config",
    "ResultRow",
    "rows_to_csv",
    "rows_from_csv",
    "run_convergence",
    "run_lower_bound",
    "run_histogram_demo",
    "run_conditions",
    "PlotLayout",
    "emit_plot",
]
