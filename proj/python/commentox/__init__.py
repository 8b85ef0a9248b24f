"""Measurement pipeline for toxicity in online discussions.

Thin wrapper over the C++ core; see `commentox._core` for the operations.
"""

from ._core import (
    Corpus,
    PipelineError,
    attach_labels,
    breakdown_csv,
    delays_csv,
    krippendorff_interval,
    load_corpus,
    ols_fit,
    profiles_csv,
    regression_csv,
    run_cli,
    save_corpus,
    student_t_two_sided_p,
    synth_corpus,
    trimmed_mean,
)

__all__ = [
    "Corpus",
    "PipelineError",
    "attach_labels",
    "breakdown_csv",
    "delays_csv",
    "krippendorff_interval",
    "load_corpus",
    "ols_fit",
    "profiles_csv",
    "regression_csv",
    "run_cli",
    "save_corpus",
    "student_t_two_sided_p",
    "synth_corpus",
    "trimmed_mean",
]

__version__ = "0.1.0"
