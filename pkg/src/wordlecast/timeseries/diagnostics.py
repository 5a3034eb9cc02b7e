"""Correlograms and the augmented Dickey-Fuller unit-root test."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .series import Series

# Dickey-Fuller tau critical values, regression with constant and no trend.
# Rows: sample size; columns: 1%, 5%, 10%.
_DF_SAMPLE_SIZES = (25, 50, 100, 250, 500, math.inf)
_DF_CRITICAL = np.array([
    [-3.75, -3.00, -2.63],
    [-3.58, -2.93, -2.60],
    [-3.51, -2.89, -2.58],
    [-3.46, -2.88, -2.57],
    [-3.44, -2.87, -2.57],
    [-3.43, -2.86, -2.57],
])


def _values(series) -> np.ndarray:
    if isinstance(series, Series):
        return series.values
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("expected a non-empty finite 1-D series")
    return x


def acf(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelations r_0..r_max_lag (biased estimator, r_0 = 1)."""
    x = _values(series)
    if not 0 <= max_lag < x.size:
        raise ValueError(f"max_lag must be in [0, {x.size - 1}]")
    if np.ptp(x) == 0:
        raise ValueError("series is constant; autocorrelation undefined")
    dev = x - x.mean()
    denom = float(dev @ dev)
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(dev[:-k] @ dev[k:]) / denom
    return out


def durbin_levinson(r: np.ndarray) -> np.ndarray:
    """Partial autocorrelations for lags 1..len(r)-1 from autocorrelations ``r``."""
    max_lag = len(r) - 1
    pacf = np.empty(max_lag)
    phi = np.zeros(0)
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_kk = r[1]
            phi = np.array([phi_kk])
        else:
            num = r[k] - phi @ r[k - 1:0:-1]
            den = 1.0 - phi @ r[1:k]
            phi_kk = num / den
            phi = np.append(phi - phi_kk * phi[::-1], phi_kk)
        pacf[k - 1] = phi_kk
    return pacf


def pacf(series, max_lag: int) -> np.ndarray:
    """Partial autocorrelations for lags 1..max_lag (index 0 is lag 1)."""
    x = _values(series)
    if not 1 <= max_lag < x.size / 2:
        raise ValueError(f"max_lag must be in [1, {x.size / 2})")
    return durbin_levinson(acf(x, max_lag))


def confidence_band(n: int, z: float = 1.96) -> float:
    """Half-width of the white-noise band for a correlogram of ``n`` points."""
    if n < 2:
        raise ValueError("need n >= 2")
    return z / math.sqrt(n)


def df_critical_values(nobs: int) -> dict[str, float]:
    """1%/5%/10% critical values, linear in 1/nobs between tabulated rows."""
    inv = np.array([1.0 / t for t in _DF_SAMPLE_SIZES])[::-1]
    table = _DF_CRITICAL[::-1]
    u = min(1.0 / nobs, inv[-1])
    return {level: float(np.interp(u, inv, table[:, j]))
            for j, level in enumerate(("1%", "5%", "10%"))}


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    reject: bool
    used_lag: int
    nobs: int
    critical_values: dict


def _ols(y, X):
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise np.linalg.LinAlgError("singular Dickey-Fuller regression matrix")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return beta, resid


def _df_design(x, lag, nobs):
    """Regressors for the last ``nobs`` differences: const, level, lagged diffs."""
    dx = np.diff(x)
    n = dx.size
    rows = np.arange(n - nobs, n)
    cols = [np.ones(nobs), x[rows]]
    cols += [dx[rows - i] for i in range(1, lag + 1)]
    return dx[rows], np.column_stack(cols)


def adf_test(series, max_aug_lag: int | None = None, level: str = "5%") -> AdfResult:
    """Augmented Dickey-Fuller test with a constant.

    The augmentation lag is picked by AIC over 0..max_aug_lag on a common
    sample, then the chosen regression is re-run on all available rows.
    ``reject`` is True when the t-statistic on the lagged level falls below
    the critical value, i.e. the series looks stationary.
    """
    x = _values(series)
    if x.size < 20:
        raise ValueError("ADF test needs at least 20 observations")
    if max_aug_lag is None:
        max_aug_lag = int(math.ceil(12 * (x.size / 100) ** 0.25))
    max_aug_lag = max(0, min(max_aug_lag, x.size // 2 - 3))

    common = x.size - 1 - max_aug_lag
    best_lag, best_aic = 0, math.inf
    for lag in range(max_aug_lag + 1):
        y, X = _df_design(x, lag, common)
        _, resid = _ols(y, X)
        aic = common * math.log(float(resid @ resid) / common) + 2 * X.shape[1]
        if aic < best_aic - 1e-12:
            best_lag, best_aic = lag, aic

    nobs = x.size - 1 - best_lag
    y, X = _df_design(x, best_lag, nobs)
    beta, resid = _ols(y, X)
    dof = nobs - X.shape[1]
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    stat = float(beta[1] / math.sqrt(cov[1, 1]))
    crit = df_critical_values(nobs)
    return AdfResult(stat, stat < crit[level], best_lag, nobs, crit)


def _first_sustained_entry(values, band, run=2):
    """First lag (1-based) from which ``run`` consecutive values sit inside the band."""
    inside = np.abs(values) <= band
    for i in range(len(values)):
        if inside[i:i + run].all():
            return i + 1
    return len(values) + 1


@dataclass(frozen=True)
class DiagnosticsReport:
    acf: np.ndarray
    pacf: np.ndarray
    band_halfwidth: float
    adf_statistic: float
    adf_reject_unit_root: bool
    suggested_p: int
    suggested_d: int
    suggested_q: int
    white_noise: bool | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lag", "acf", "pacf", "band"])
        for lag in range(len(self.acf)):
            p = "" if lag == 0 else repr(float(self.pacf[lag - 1]))
            w.writerow([lag, repr(float(self.acf[lag])), p, repr(self.band_halfwidth)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "band_halfwidth": self.band_halfwidth,
            "adf_statistic": self.adf_statistic,
            "adf_reject_unit_root": self.adf_reject_unit_root,
            "suggested_order": [self.suggested_p, self.suggested_d, self.suggested_q],
            "white_noise": self.white_noise,
        }


def diagnose(series, max_lag: int = 20, z: float = 1.96, max_aug_lag: int | None = None,
             max_q: int = 2) -> DiagnosticsReport:
    """Correlograms, ADF verdict and an advisory (p, d, q).

    d is the number of differences (at most 2) needed before the ADF test
    rejects a unit root. p is the lag just before the partial
    autocorrelations settle inside the band; q is read the same way off the
    ACF and capped at ``max_q``.
    """
    x = _values(series)
    d = 0
    work = x
    adf = adf_test(work, max_aug_lag)
    first = adf
    while not adf.reject and d < 2:
        d += 1
        work = np.diff(work)
        adf = adf_test(work, max_aug_lag)
    r = acf(work, max_lag)
    pc = pacf(work, max_lag)
    band = confidence_band(work.size, z)
    p = _first_sustained_entry(pc, band) - 1
    q = min(max_q, _first_sustained_entry(r[1:], band) - 1)
    return DiagnosticsReport(
        acf=r, pacf=pc, band_halfwidth=band,
        adf_statistic=first.statistic, adf_reject_unit_root=first.reject,
        suggested_p=p, suggested_d=d, suggested_q=q,
    )
