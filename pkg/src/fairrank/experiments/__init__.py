"""Experiment sweeps producing plot-ready CSV rows."""

from .output import HEADER, UNDEFINED, Experiment, ExperimentRow, rows_to_csv, write_csv, write_json
from .runfile import RunFile, RunRecord, load_run_file, rank_by_relevance
from .sweeps import (
    RELEVANCE_METRICS,
    RUN_SWEEPS,
    SYNTHETIC_SWEEPS,
    SweepConfig,
    run_closeness_sweep,
    run_length_sweep,
    run_proportion_sweep,
    run_rescaling_sweep,
    run_translation_sweep,
)

__all__ = [
    "HEADER", "UNDEFINED", "Experiment", "ExperimentRow", "rows_to_csv", "write_csv", "write_json",
    "RunFile", "RunRecord", "load_run_file", "rank_by_relevance",
    "RELEVANCE_METRICS", "RUN_SWEEPS", "SYNTHETIC_SWEEPS", "SweepConfig",
    "run_closeness_sweep", "run_length_sweep", "run_proportion_sweep", "run_rescaling_sweep",
    "run_translation_sweep",
]
