"""Soft-label gradient boosting with a Brier-score objective."""

from ._core import (
    Booster,
    GaussianNB,
    NumericError,
    ValidationError,
    brier_grad_hess,
    brier_loss,
    brier_score,
    fit_gaussian_nb,
    fit_gbdt,
    fit_smooth_kernel,
    git_blob_hash,
    logloss_grad_hess,
    resolution_counts,
    run_cli,
    set_num_threads,
    smooth,
    softmax,
)

__all__ = [
    "Booster",
    "GaussianNB",
    "NumericError",
    "ValidationError",
    "brier_grad_hess",
    "brier_loss",
    "brier_score",
    "fit_gaussian_nb",
    "fit_gbdt",
    "fit_smooth_kernel",
    "git_blob_hash",
    "logloss_grad_hess",
    "resolution_counts",
    "run_cli",
    "set_num_threads",
    "smooth",
    "softmax",
]
