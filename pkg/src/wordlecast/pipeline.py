"""End-to-end workflows shared by the command line and the acceptance suite."""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import neural
from .dataset import (CleaningReport, Corpus, DatasetError, clean_corpus, date_of,
                      day_index, load_dataset, split_train_test, validate_word)
from .difficulty import DifficultyModel, avg_tries, classify, level_summary, select_k
from .timeseries import (ArimaOrder, ArimaxModel, Series, error_metrics, fit_arimax,
                         fit_exponential_decay, forecast)
from .wordfeat import (BASIC_COLUMNS, FEATURE_COLUMNS, LetterFrequencyTable, PosLexicon,
                       WordFeatures, build_letter_frequency, default_lexicon,
                       extract_features)

DECLINE_START = dt.date(2022, 2, 2)
TEST_START = dt.date(2022, 12, 1)
DEFAULT_ORDER = ArimaOrder(9, 0, 2)
TARGET_DATE = dt.date(2023, 3, 1)


def load_clean(path) -> tuple[Corpus, CleaningReport]:
    return clean_corpus(load_dataset(path))


def declining_series(corpus: Corpus, start: dt.date = DECLINE_START,
                     end: dt.date | None = None) -> Series:
    part = corpus.between(start, end)
    if not len(part):
        raise DatasetError(f"no records between {start} and {end or corpus.last_date}")
    return Series.from_corpus(part)


@dataclass
class WindowEvaluation:
    """Fit on the declining period up to ``test_start``, score the rest."""

    arima: ArimaxModel
    arimax: ArimaxModel
    test_days: np.ndarray
    actual: np.ndarray
    arima_pred: np.ndarray
    arimax_pred: np.ndarray
    decay_pred: np.ndarray
    decay_params: tuple[float, float, float]

    @property
    def arima_metrics(self):
        return error_metrics(self.arima_pred, self.actual)

    @property
    def arimax_metrics(self):
        return error_metrics(self.arimax_pred, self.actual)

    @property
    def decay_metrics(self):
        return error_metrics(self.decay_pred, self.actual)

    def summary(self) -> dict:
        return {
            "test_window": [date_of(int(self.test_days[0])).isoformat(),
                            date_of(int(self.test_days[-1])).isoformat()],
            "arima": self.arima_metrics.to_dict(),
            "arimax": self.arimax_metrics.to_dict(),
            "exponential_decay": {**self.decay_metrics.to_dict(),
                                  "a": self.decay_params[0], "b": self.decay_params[1],
                                  "c": self.decay_params[2]},
            "weekend_factor": self.arimax.weekend_factor,
            "order": list(self.arimax.order),
        }


def evaluate_window(corpus: Corpus, order=DEFAULT_ORDER, weekend_factor: float = 0.0459,
                    start: dt.date = DECLINE_START, test_start: dt.date = TEST_START
                    ) -> WindowEvaluation:
    train, test = split_train_test(corpus.between(start), test_start)
    history = Series.from_corpus(train)
    actual = np.array(test.reported_results, dtype=float)
    horizon = len(test)
    arima = fit_arimax(history, order, 0.0)
    arimax = fit_arimax(history, order, weekend_factor) if weekend_factor else arima
    decay = fit_exponential_decay(history)
    days = np.arange(history.end_day_index + 1, history.end_day_index + horizon + 1)
    return WindowEvaluation(
        arima=arima, arimax=arimax, test_days=days, actual=actual,
        arima_pred=forecast(arima, history, horizon),
        arimax_pred=forecast(arimax, history, horizon),
        decay_pred=decay.predict(days), decay_params=(decay.a, decay.b, decay.c),
    )


@dataclass
class DateForecast:
    target: dt.date
    point_forecast: float
    model: ArimaxModel
    history: Series
    path: np.ndarray

    def summary(self) -> dict:
        return {
            "date": self.target.isoformat(),
            "day_index": day_index(self.target),
            "point_forecast": float(self.point_forecast),
            "model": self.model.to_dict(),
            "history": [self.history.first_date.isoformat(),
                        self.history.last_date.isoformat()],
        }


def forecast_series(history: Series, target: dt.date, order=DEFAULT_ORDER,
                    weekend_factor: float = 0.0459) -> DateForecast:
    horizon = day_index(target) - history.end_day_index
    if horizon < 1:
        raise ValueError(f"target {target} is not after the last observed day "
                         f"{history.last_date}")
    model = fit_arimax(history, order, weekend_factor)
    path = forecast(model, history, horizon)
    return DateForecast(target, float(path[-1]), model, history, path)


def forecast_date(corpus: Corpus, target: dt.date = TARGET_DATE, order=DEFAULT_ORDER,
                  weekend_factor: float = 0.0459, start: dt.date = DECLINE_START
                  ) -> DateForecast:
    return forecast_series(declining_series(corpus, start), target, order, weekend_factor)


# --- sensitivity -----------------------------------------------------------

def _normal_weights(points, centre, sd):
    w = np.exp(-0.5 * ((np.asarray(points, float) - centre) / sd) ** 2)
    return tuple(float(v) for v in w / w.sum())


@dataclass(frozen=True)
class InjectionSpec:
    """Extra players added on each day of [start, end], solving in 4, 5, 6 or X."""

    start: dt.date
    end: dt.date
    added_per_day: float
    bucket_distribution: tuple[float, float, float, float]

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError("injection end precedes start")
        if self.added_per_day < 0:
            raise ValueError("added player count must be non-negative")
        if len(self.bucket_distribution) != 4 or min(self.bucket_distribution) < 0 \
                or not math.isclose(sum(self.bucket_distribution), 1.0, abs_tol=1e-9):
            raise ValueError("bucket distribution over 4, 5, 6, X must sum to 1")


# 30,000 contestants x 95% = 28,500 extra players over 16-18 Feb 2023, their
# results spread as a discretised normal centred between 5 and 6 tries.
SCENARIOS = {
    "comap-2023": InjectionSpec(dt.date(2023, 2, 16), dt.date(2023, 2, 18), 28500 / 3,
                                _normal_weights([4, 5, 6, 7], 5.5, 1.0)),
}


@dataclass
class SensitivityReport:
    spec: InjectionSpec
    target: dt.date
    plain_forecast: float
    baseline_forecast: float
    perturbed_forecast: float
    perturbed_days: list[dict] = field(default_factory=list)

    @property
    def relative_deviation(self) -> float:
        return abs(self.perturbed_forecast - self.baseline_forecast) / self.baseline_forecast

    @property
    def relative_deviation_vs_plain(self) -> float:
        return abs(self.perturbed_forecast - self.plain_forecast) / self.plain_forecast

    def summary(self) -> dict:
        return {
            "target": self.target.isoformat(),
            "injection": {"start": self.spec.start.isoformat(),
                          "end": self.spec.end.isoformat(),
                          "added_per_day": self.spec.added_per_day,
                          "bucket_distribution": list(self.spec.bucket_distribution)},
            "plain_forecast": self.plain_forecast,
            "baseline_forecast": self.baseline_forecast,
            "perturbed_forecast": self.perturbed_forecast,
            "relative_deviation": self.relative_deviation,
            "relative_deviation_vs_plain": self.relative_deviation_vs_plain,
        }


def _perturbed_history(corpus: Corpus, spec: InjectionSpec, filler: np.ndarray,
                       start: dt.date, added: float):
    """History from ``start`` through the injection end, plus per-day records.

    Days after the corpus end are filled with ``filler`` (the unperturbed
    forecast); days in the injection window get ``added`` extra players whose
    results follow the scenario's bucket distribution.
    """
    base = declining_series(corpus, start)
    end_idx = max(base.end_day_index, day_index(spec.end))
    n_extra = end_idx - base.end_day_index
    values = np.r_[base.values, filler[:n_extra]]
    mean_pct = np.mean([r.tries_pct for r in corpus.between(start)], axis=0)
    injected_pct = np.r_[np.zeros(3), 100.0 * np.asarray(spec.bucket_distribution)]

    days = []
    for offset in range(day_index(spec.start) - base.start_day_index,
                        day_index(spec.end) - base.start_day_index + 1):
        idx = base.start_day_index + offset
        old = values[offset]
        if idx <= corpus.records[-1].day_index:
            pct = np.asarray(corpus.records[idx - corpus.records[0].day_index].tries_pct, float)
        else:
            pct = mean_pct
        values[offset] = old + added
        new_pct = (pct * old + injected_pct * added) / (old + added) if old + added else pct
        days.append({"date": date_of(idx).isoformat(), "reported_results": float(values[offset]),
                     "tries_pct": [float(v) for v in new_pct]})
    return Series(values, base.start_day_index), days


def run_sensitivity(corpus: Corpus, spec: InjectionSpec, target: dt.date = TARGET_DATE,
                    order=DEFAULT_ORDER, weekend_factor: float = 0.0459,
                    start: dt.date = DECLINE_START) -> SensitivityReport:
    """Refit after injecting extra players and compare the target-day forecast.

    The baseline is the same refit with zero added players, so an empty
    injection reproduces it exactly; the plain forecast from the
    unextended corpus is reported alongside.
    """
    if spec.start <= max(start, corpus.first_date):
        raise ValueError(f"injection start {spec.start} is not inside the modelled period")
    if spec.end >= target:
        raise ValueError(f"injection end {spec.end} is not before the target {target}")
    plain = forecast_date(corpus, target, order, weekend_factor, start)
    gap = max(0, day_index(spec.end) - plain.history.end_day_index)
    filler = plain.path[:gap]

    base_hist, _ = _perturbed_history(corpus, spec, filler, start, 0.0)
    pert_hist, days = _perturbed_history(corpus, spec, filler, start, spec.added_per_day)
    baseline = forecast_series(base_hist, target, order, weekend_factor)
    perturbed = forecast_series(pert_hist, target, order, weekend_factor)
    return SensitivityReport(spec, target, plain.point_forecast, baseline.point_forecast,
                             perturbed.point_forecast, days)


# --- word models -----------------------------------------------------------

@dataclass
class WordData:
    features: list[WordFeatures]
    table: LetterFrequencyTable
    lexicon: PosLexicon
    targets: np.ndarray  # percentages, one row per day

    def matrix(self, columns: Sequence[str] = FEATURE_COLUMNS) -> np.ndarray:
        return np.array([f.vector(columns) for f in self.features])

    @property
    def averages(self) -> np.ndarray:
        return np.array([avg_tries(t) for t in self.targets])


def word_data(corpus: Corpus, lexicon: PosLexicon | None = None) -> WordData:
    table = build_letter_frequency(corpus)
    lexicon = default_lexicon() if lexicon is None else lexicon
    feats = [extract_features(r.word, r.day_index, table, lexicon) for r in corpus]
    targets = np.array([r.tries_pct for r in corpus], dtype=float)
    return WordData(feats, table, lexicon, targets)


@dataclass
class WordPrediction:
    word: str
    date: dt.date
    prediction: neural.DistributionPrediction
    level: int | None

    def summary(self) -> dict:
        out = {"word": self.word, "date": self.date.isoformat(),
               "day_index": day_index(self.date), **self.prediction.to_dict()}
        if self.level is not None:
            out["level"] = self.level
        return out


def predict_word(model: neural.MlpModel, data: WordData, word: str, date: dt.date,
                 difficulty: DifficultyModel | None = None,
                 columns: Sequence[str] = FEATURE_COLUMNS) -> WordPrediction:
    validate_word(word)
    feats = extract_features(word, day_index(date), data.table, data.lexicon)
    pct = neural.predict_raw(model, feats.vector(columns)[None, :])[0]
    pred = neural.DistributionPrediction.from_probabilities(pct / 100.0)
    level = classify(pred.avg_tries, difficulty) if difficulty is not None else None
    return WordPrediction(word, date, pred, level)


def difficulty_levels(data: WordData, k_min: int = 2, k_max: int = 8):
    model, scores = select_k(data.averages, k_min, k_max)
    summaries = level_summary(data.features, model.assignments, data.averages, model.k)
    return model, scores, summaries


__all__ = [
    "BASIC_COLUMNS", "DECLINE_START", "DEFAULT_ORDER", "FEATURE_COLUMNS", "SCENARIOS",
    "TARGET_DATE", "TEST_START", "DateForecast", "InjectionSpec", "SensitivityReport",
    "WindowEvaluation", "WordData", "WordPrediction", "declining_series",
    "difficulty_levels", "evaluate_window", "forecast_date", "forecast_series",
    "load_clean", "predict_word", "run_sensitivity", "word_data",
]
