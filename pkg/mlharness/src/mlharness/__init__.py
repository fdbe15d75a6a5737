"""Random-forest evaluation harness for chainlet orbit datasets."""

from .data import CLASSES, SUBSETS, Dataset, HarnessError, load_dataset, subset_columns
from .model import EvalResult, evaluate
from .report import render_text, write_json

__version__ = "0.1.0"

__all__ = [
    "CLASSES",
    "Dataset",
    "EvalResult",
    "HarnessError",
    "SUBSETS",
    "evaluate",
    "load_dataset",
    "render_text",
    "subset_columns",
    "write_json",
]
