"""Cardiac fat quantification and regression benchmarks (C++ core)."""

from ._core import (
    Error,
    classify_pixel,
    count_slice,
    counts_to_volume,
    evaluate,
    fixed_coefficients,
    invert_fixed,
    load_counts_csv,
    predict_fixed,
    predict_model,
    run_experiment,
    split_folds,
)

__all__ = [
    "Error",
    "classify_pixel",
    "count_slice",
    "counts_to_volume",
    "evaluate",
    "fixed_coefficients",
    "invert_fixed",
    "load_counts_csv",
    "predict_fixed",
    "predict_model",
    "run_experiment",
    "split_folds",
]
