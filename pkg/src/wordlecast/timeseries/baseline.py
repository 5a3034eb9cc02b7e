"""Exponential-decay curve x(t) = a * exp(-b t) + c fitted by least squares."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .metrics import ErrorMetrics, error_metrics
from .series import Series


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExpDecayFit:
    a: float
    b: float
    c: float
    metrics: ErrorMetrics
    origin_day_index: int

    def predict(self, day_indices) -> np.ndarray:
        t = np.asarray(day_indices, dtype=float) - self.origin_day_index
        return self.a * np.exp(-self.b * t) + self.c

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.metrics))


def fit_exponential_decay(series: Series, max_iter: int = 20000) -> ExpDecayFit:
    """Fit the decay curve with Nelder-Mead, ``b`` constrained to be >= 0.

    Time is measured in days from the first observation. The search runs on
    the standardised series so the three parameters have comparable scale.
    """
    x = series.values
    if x.size < 4:
        raise ValueError("exponential decay fit needs at least 4 points")
    t = np.arange(x.size, dtype=float)
    loc = float(x.mean())
    scale = float(x.std()) or 1.0
    z = (x - loc) / scale

    def sse(params):
        a, b, c = params
        r = a * np.exp(-b * t) + c - z
        return float(r @ r)

    tail = max(1, x.size // 10)
    c0 = float(z[-tail:].mean())
    a0 = float(z[:tail].mean()) - c0
    b0 = 3.0 / x.size
    if abs(a0) > 1e-12:
        ratio = (z[x.size // 2] - c0) / a0
        if 0 < ratio < 1:
            b0 = -np.log(ratio) / (x.size // 2)

    start = np.array([a0, b0, c0])
    bounds = [(None, None), (0.0, None), (None, None)]
    options = {"maxiter": max_iter, "maxfev": 2 * max_iter, "xatol": 1e-10, "fatol": 1e-14}
    res = minimize(sse, start, method="Nelder-Mead", bounds=bounds, options=options)
    for _ in range(5):
        if res.success and res.nit > 1:
            again = minimize(sse, res.x, method="Nelder-Mead", bounds=bounds, options=options)
            if again.fun >= res.fun - 1e-14:
                break
            res = again
        else:
            break
    if not res.success:
        raise ConvergenceError(f"exponential decay fit did not converge: {res.message}")

    a, b, c = res.x
    a, c = a * scale, c * scale + loc
    fitted = a * np.exp(-b * t) + c
    return ExpDecayFit(float(a), float(b), float(c), error_metrics(fitted, x),
                       series.start_day_index)
