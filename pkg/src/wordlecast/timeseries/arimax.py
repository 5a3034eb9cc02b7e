"""ARIMA(p, d, q) with a multiplicative weekday/weekend modifier.

The modifier W_t is 1 on weekdays and ``1 - weekend_factor`` on Saturdays and
Sundays. The model is fitted to Z_t = W_t * X_t and forecasts are mapped back
by dividing by W at the target day. With ``weekend_factor == 0`` this is
plain ARIMA.

Estimation minimises the conditional sum of squares (CSS) of one-step
residuals with pre-sample residuals set to zero, using Nelder-Mead. The
ARMA part is written in mean form::

    y_t - mu = sum_i phi_i (y_{t-i} - mu) + e_t + sum_j theta_j e_{t-j}

where y is Z differenced d times.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_toeplitz
from scipy.optimize import minimize
from scipy.signal import lfilter

from .baseline import ConvergenceError
from .diagnostics import (DiagnosticsReport, _first_sustained_entry, acf, adf_test,
                          confidence_band, pacf)
from .series import Series, weekend_mask


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("orders must be non-negative")
        if self.p + self.q < 1:
            raise ValueError("need p + q >= 1")
        if self.d > 2:
            raise ValueError("d must be at most 2")

    def __iter__(self):
        return iter((self.p, self.d, self.q))

    def __str__(self):
        return f"({self.p},{self.d},{self.q})"


@dataclass(frozen=True)
class ArimaxModel:
    order: ArimaOrder
    ar_coeffs: tuple[float, ...]
    ma_coeffs: tuple[float, ...]
    intercept: float
    weekend_factor: float
    residual_variance: float
    training_range: tuple[int, int]
    css: float = 0.0
    stable: bool = True
    converged: bool = True
    iterations: int = 0
    css_trace: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if len(self.ar_coeffs) != self.order.p or len(self.ma_coeffs) != self.order.q:
            raise ValueError("coefficient counts do not match the order")
        if self.residual_variance < 0:
            raise ValueError("residual variance must be non-negative")

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "ar_coeffs": [float(f"{c:.17g}") for c in self.ar_coeffs],
            "ma_coeffs": [float(f"{c:.17g}") for c in self.ma_coeffs],
            "intercept": float(f"{self.intercept:.17g}"),
            "weekend_factor": self.weekend_factor,
            "residual_variance": float(f"{self.residual_variance:.17g}"),
            "training_range": list(self.training_range),
            "css": float(f"{self.css:.17g}"),
            "stable": self.stable,
            "converged": self.converged,
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ArimaxModel":
        return cls(
            order=ArimaOrder(*d["order"]),
            ar_coeffs=tuple(d["ar_coeffs"]), ma_coeffs=tuple(d["ma_coeffs"]),
            intercept=d["intercept"], weekend_factor=d["weekend_factor"],
            residual_variance=d["residual_variance"],
            training_range=tuple(d["training_range"]), css=d.get("css", 0.0),
            stable=d.get("stable", True), converged=d.get("converged", True),
            iterations=d.get("iterations", 0),
        )

    @classmethod
    def from_json(cls, text: str) -> "ArimaxModel":
        return cls.from_dict(json.loads(text))


def weekend_weights(day_indices, weekend_factor: float) -> np.ndarray:
    return np.where(weekend_mask(day_indices), 1.0 - weekend_factor, 1.0)


def adjust(series: Series, weekend_factor: float) -> np.ndarray:
    """Z_t = W_t X_t; the identity (no arithmetic at all) when the factor is 0."""
    if weekend_factor == 0:
        return series.values.copy()
    return series.values * weekend_weights(series.day_indices, weekend_factor)


def css_residuals(y, mu, phi, theta) -> np.ndarray:
    """Conditional residuals e_p..e_{n-1} given the first p observations."""
    p = len(phi)
    z = np.asarray(y, dtype=float) - mu
    w = z[p:].copy()
    for i, c in enumerate(phi, start=1):
        w -= c * z[p - i:z.size - i]
    if len(theta):
        return lfilter([1.0], np.r_[1.0, theta], w)
    return w


def ar_is_stable(phi) -> bool:
    if len(phi) == 0:
        return True
    roots = np.roots(np.r_[-np.asarray(phi)[::-1], 1.0])
    return bool(np.all(np.abs(roots) > 1.0))


def ma_is_invertible(theta) -> bool:
    if len(theta) == 0:
        return True
    if len(theta) == 1:
        return abs(theta[0]) < 1.0
    roots = np.roots(np.r_[np.asarray(theta)[::-1], 1.0])
    return bool(np.all(np.abs(roots) > 1.0))


def _yule_walker(y, p):
    if p == 0:
        return np.zeros(0)
    if np.ptp(y) == 0:
        return np.zeros(p)
    r = acf(y, p)
    return solve_toeplitz(r[:p], r[1:p + 1])


def fit_arimax(series: Series, order: ArimaOrder | tuple, weekend_factor: float = 0.0,
               max_restarts: int = 10, rtol: float = 1e-5) -> ArimaxModel:
    """Estimate (mu, phi, theta) by CSS.

    The search starts from Yule-Walker AR coefficients, zero MA terms and
    the series mean, and runs Nelder-Mead on the standardised series.
    The MA polynomial is held invertible (the objective is infinite
    outside that region): theta and its reciprocal roots describe the same
    autocorrelations, and outside it the zero-start residual recursion
    explodes. The AR part is unrestricted; instability is only flagged.

    Nelder-Mead is restarted from its own optimum until a fresh simplex
    lowers the objective by no more than ``rtol`` (relative). If the restart
    budget runs out first the best point is kept, ``converged`` is False and
    a warning is issued.

    Raises
    ------
    ConvergenceError
        If no parameter vector with a finite objective is found.
    """
    if not isinstance(order, ArimaOrder):
        order = ArimaOrder(*order)
    p, d, q = order
    if not 0 <= weekend_factor <= 0.5:
        raise ValueError("weekend_factor must lie in [0, 0.5]")
    if len(series) <= 10 * (p + q):
        raise ValueError(f"series of length {len(series)} too short for order {order}")

    y = np.diff(adjust(series, weekend_factor), n=d)
    loc = float(y.mean())
    scale = float(y.std()) or 1.0
    z = (y - loc) / scale

    def objective(params):
        if not ma_is_invertible(params[p + 1:]):
            return 1e300
        e = css_residuals(z, params[0], params[1:p + 1], params[p + 1:])
        val = float(e @ e)
        return val if np.isfinite(val) else 1e300

    x0 = np.r_[0.0, _yule_walker(z, p), np.zeros(q)]
    trace = [objective(x0)]
    iterations = 0

    def record(xk):
        trace.append(objective(xk))

    k = x0.size
    options = {"maxiter": 2000 * k, "maxfev": 4000 * k, "xatol": 1e-9,
               "fatol": 1e-13 * max(1.0, trace[0]), "adaptive": k > 3}
    best_x, best_f = x0, trace[0]
    converged = False
    for _ in range(max_restarts + 1):
        run = minimize(objective, best_x, method="Nelder-Mead", callback=record,
                       options=options)
        iterations += run.nit
        gain = best_f - run.fun
        if run.fun <= best_f:
            best_x, best_f = run.x, run.fun
        if gain <= rtol * max(abs(best_f), 1e-300):
            converged = True
            break
    if not best_f < 1e300:
        raise ConvergenceError(f"CSS objective for ARIMA{order} is not finite")
    if not converged:
        warnings.warn(f"CSS optimisation for ARIMA{order} still improving after "
                      f"{max_restarts} restarts; keeping the best point",
                      RuntimeWarning, stacklevel=2)
    res_x = best_x

    mu = loc + scale * res_x[0]
    phi = tuple(float(c) for c in res_x[1:p + 1])
    theta = tuple(float(c) for c in res_x[p + 1:])
    e = css_residuals(y, mu, phi, theta)
    css = float(e @ e)
    stable = ar_is_stable(phi)
    if not stable:
        warnings.warn(f"fitted AR polynomial of ARIMA{order} has a root on or inside "
                      "the unit circle", RuntimeWarning, stacklevel=2)
    return ArimaxModel(
        order=order, ar_coeffs=phi, ma_coeffs=theta, intercept=float(mu),
        weekend_factor=float(weekend_factor),
        residual_variance=css / (y.size - p - q - 1),
        training_range=(series.start_day_index, series.end_day_index),
        css=css, stable=stable, converged=converged, iterations=iterations,
        css_trace=tuple(trace),
    )


def fit_arima(series: Series, order) -> ArimaxModel:
    return fit_arimax(series, order, 0.0)


def _residuals(model: ArimaxModel, series: Series):
    p, d, _ = model.order
    zser = adjust(series, model.weekend_factor)
    y = np.diff(zser, n=d)
    e = css_residuals(y, model.intercept, model.ar_coeffs, model.ma_coeffs)
    return zser, y, e


def residuals(model: ArimaxModel, series: Series) -> np.ndarray:
    """In-sample one-step residuals on the adjusted, differenced scale."""
    return _residuals(model, series)[2]


def fitted_values(model: ArimaxModel, series: Series) -> np.ndarray:
    """One-step-ahead in-sample predictions in original units.

    The first p + d days have no prediction and are NaN.
    """
    p, d, _ = model.order
    zser, _, e = _residuals(model, series)
    out = np.full(len(series), np.nan)
    zhat = zser[p + d:] - e
    if model.weekend_factor == 0:
        out[p + d:] = zhat
    else:
        out[p + d:] = zhat / weekend_weights(series.day_indices[p + d:], model.weekend_factor)
    return out


def forecast(model: ArimaxModel, series: Series, horizon: int) -> np.ndarray:
    """Iterated forecasts for the ``horizon`` days after the end of ``series``."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    p, d, q = model.order
    zser, y, e = _residuals(model, series)
    mu = model.intercept
    phi = np.asarray(model.ar_coeffs)
    theta = np.asarray(model.ma_coeffs)

    ext = np.r_[y, np.zeros(horizon)]
    err = np.r_[np.zeros(p), e, np.zeros(horizon)]
    n = y.size
    for h in range(horizon):
        t = n + h
        val = mu
        for i in range(1, p + 1):
            val += phi[i - 1] * (ext[t - i] - mu)
        for j in range(1, q + 1):
            if t - j >= 0:
                val += theta[j - 1] * err[t - j]
        ext[t] = val
    future = ext[n:]

    levels = [zser]
    for _ in range(d):
        levels.append(np.diff(levels[-1]))
    for k in range(d - 1, -1, -1):
        future = levels[k][-1] + np.cumsum(future)

    days = np.arange(series.end_day_index + 1, series.end_day_index + horizon + 1)
    if model.weekend_factor != 0:
        future = future / weekend_weights(days, model.weekend_factor)
    if np.any(future < 0):
        warnings.warn("negative forecasts clamped at 0", RuntimeWarning, stacklevel=2)
        future = np.maximum(future, 0.0)
    if not np.all(np.isfinite(future)):
        raise FloatingPointError("forecast produced non-finite values")
    return future


def residual_whiteness(model: ArimaxModel, series: Series, max_lag: int = 20,
                       z: float = 1.96, max_outside: float = 0.10) -> DiagnosticsReport:
    """Correlogram of in-sample residuals and a white-noise verdict.

    The residuals count as white when at most ``max_outside`` of lags
    1..max_lag fall outside the band.
    """
    e = residuals(model, series)
    if e.size < 30:
        raise ValueError("need at least 30 residuals")
    max_lag = min(max_lag, e.size // 2 - 1)
    r = acf(e, max_lag)
    pc = pacf(e, max_lag)
    band = confidence_band(e.size, z)
    outside = int(np.sum(np.abs(r[1:]) > band))
    adf = adf_test(e)
    return DiagnosticsReport(
        acf=r, pacf=pc, band_halfwidth=band,
        adf_statistic=adf.statistic, adf_reject_unit_root=adf.reject,
        suggested_p=_first_sustained_entry(pc, band) - 1,
        suggested_d=0 if adf.reject else 1,
        suggested_q=min(2, _first_sustained_entry(r[1:], band) - 1),
        white_noise=outside <= max_outside * max_lag,
    )
