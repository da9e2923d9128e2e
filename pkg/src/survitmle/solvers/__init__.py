"""Penalized weighted regression engine (coordinate descent, compiled kernel)."""

from ._backend import kernel_name
from ._glm import (
    CoefVector,
    DesignMatrix,
    FitSpec,
    SolverError,
    cross_validate_lambda,
    expit,
    fit,
    fit_at,
    fit_path,
    held_out_loss,
    soft_threshold,
)

__all__ = [
    "CoefVector",
    "DesignMatrix",
    "FitSpec",
    "SolverError",
    "cross_validate_lambda",
    "expit",
    "fit",
    "fit_at",
    "fit_path",
    "held_out_loss",
    "soft_threshold",
    "kernel_name",
]
