"""Experiment harness: configs, instance families, the trial runner and CSV summaries."""

from .config import FAMILIES, ExperimentConfig
from .families import FAMILY_BUILDERS, Instance, make_instance
from .runner import CSV_COLUMNS, CSV_VERSION_LINE, TrialRow, rows_to_csv, run_experiment, run_trial, write_csv
from .summary import SummaryRow, format_summary, read_csv_rows, summarize

__all__ = [
    "CSV_COLUMNS",
    "CSV_VERSION_LINE",
    "ExperimentConfig",
    "FAMILIES",
    "FAMILY_BUILDERS",
    "Instance",
    "SummaryRow",
    "TrialRow",
    "format_summary",
    "make_instance",
    "read_csv_rows",
    "rows_to_csv",
    "run_experiment",
    "run_trial",
    "summarize",
    "write_csv",
]
