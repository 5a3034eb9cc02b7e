from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ErrorMetrics:
    mean_relative_error: float
    mae: float

    def to_dict(self) -> dict:
        return {"mean_relative_error": self.mean_relative_error, "mae": self.mae}


def error_metrics(predicted, actual) -> ErrorMetrics:
    """Mean of |pred - actual| / actual, and mean absolute error.

    Points with a zero actual value are left out of the relative error.
    """
    pred = np.asarray(predicted, dtype=float)
    act = np.asarray(actual, dtype=float)
    if pred.shape != act.shape or pred.ndim != 1 or pred.size == 0:
        raise ValueError("predicted and actual must be equal-length, non-empty 1-D")
    abs_err = np.abs(pred - act)
    nonzero = act != 0
    if not nonzero.all():
        warnings.warn(f"{int((~nonzero).sum())} zero actual value(s) excluded "
                      "from the relative error", RuntimeWarning, stacklevel=2)
    rel = float(np.mean(abs_err[nonzero] / np.abs(act[nonzero]))) if nonzero.any() else float("nan")
    return ErrorMetrics(rel, float(abs_err.mean()))
