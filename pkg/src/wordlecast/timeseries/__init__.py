"""Daily submission-count modelling: diagnostics, ARIMAX, baseline, metrics."""
from .arimax import (ArimaOrder, ArimaxModel, fit_arima, fit_arimax, fitted_values,
                     forecast, residual_whiteness, residuals)
from .baseline import ConvergenceError, ExpDecayFit, fit_exponential_decay
from .diagnostics import (AdfResult, DiagnosticsReport, acf, adf_test, confidence_band,
                          diagnose, pacf)
from .metrics import ErrorMetrics, error_metrics
from .series import Series

__all__ = [
    "AdfResult", "ArimaOrder", "ArimaxModel", "ConvergenceError", "DiagnosticsReport",
    "ErrorMetrics", "ExpDecayFit", "Series", "acf", "adf_test", "confidence_band",
    "diagnose", "error_metrics", "fit_arima", "fit_arimax", "fit_exponential_decay",
    "fitted_values", "forecast", "pacf", "residual_whiteness", "residuals",
]
