"""Figure rendering for nested-sampling run and suite outputs."""

from .data import ColumnError, load_records_jsonl, load_table_csv
from .plots import PLOT_KINDS, freedman_diaconis_bins, render

__all__ = [
    "ColumnError",
    "load_records_jsonl",
    "load_table_csv",
    "PLOT_KINDS",
    "freedman_diaconis_bins",
    "render",
]

__version__ = "0.1.0"
