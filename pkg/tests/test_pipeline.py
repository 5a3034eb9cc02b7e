import dataclasses
import datetime as dt

import numpy as np
import pytest

from wordlecast import neural, pipeline
from wordlecast.dataset import COLUMNS, clean_corpus, parse_dataset
from wordlecast.timeseries import ArimaOrder

ORDER = ArimaOrder(2, 0, 1)
FAST = neural.TrainingConfig(max_epochs=60, patience=20)


@pytest.fixture(scope="module")
def corpus(synthetic_clean):
    return synthetic_clean[0]


def constant_corpus(n=150, value=20000):
    d0 = dt.date(2022, 6, 1)
    rows = [",".join(COLUMNS)]
    for i in range(n):
        rows.append(f"{d0 + dt.timedelta(days=i)},{i},crane,{value},100,0,5,25,35,22,10,3")
    return clean_corpus(parse_dataset("\n".join(rows)))[0]


def test_evaluate_window(corpus):
    ev = pipeline.evaluate_window(corpus, ORDER, 0.0459)
    assert ev.test_days.size == 31 and ev.actual.size == 31
    assert ev.test_days[0] == 329
    s = ev.summary()
    assert s["test_window"] == ["2022-12-01", "2022-12-31"]
    for key in ("arima", "arimax", "exponential_decay"):
        assert 0 <= s[key]["mean_relative_error"] < 1
    assert ev.arima.weekend_factor == 0.0 and ev.arimax.weekend_factor == 0.0459


def test_forecast_constant_series():
    c = constant_corpus()
    fc = pipeline.forecast_date(c, c.last_date + dt.timedelta(days=1), ORDER, 0.0,
                                start=c.first_date)
    assert fc.point_forecast == pytest.approx(20000, abs=1.0)
    assert fc.path.size == 1


def test_forecast_target_inside_corpus(corpus):
    with pytest.raises(ValueError, match="not after"):
        pipeline.forecast_date(corpus, dt.date(2022, 6, 1), ORDER)


def test_forecast_summary(corpus):
    fc = pipeline.forecast_date(corpus, pipeline.TARGET_DATE, ORDER, 0.0459)
    s = fc.summary()
    assert s["day_index"] == 419 and s["date"] == "2023-03-01"
    assert s["history"] == ["2022-02-02", "2022-12-31"]
    assert fc.path.size == 419 - 359
    assert np.isfinite(fc.point_forecast) and fc.point_forecast >= 0


def test_sensitivity_zero_injection_matches_baseline(corpus):
    spec = dataclasses.replace(pipeline.SCENARIOS["comap-2023"], added_per_day=0.0)
    rep = pipeline.run_sensitivity(corpus, spec, order=ORDER)
    assert rep.perturbed_forecast == rep.baseline_forecast
    assert rep.relative_deviation == 0.0


def test_sensitivity_scenario(corpus):
    spec = pipeline.SCENARIOS["comap-2023"]
    assert spec.added_per_day * 3 == pytest.approx(28500)
    assert sum(spec.bucket_distribution) == pytest.approx(1.0)
    rep = pipeline.run_sensitivity(corpus, spec, order=ORDER)
    assert [d["date"] for d in rep.perturbed_days] == ["2023-02-16", "2023-02-17",
                                                      "2023-02-18"]
    for d in rep.perturbed_days:
        assert sum(d["tries_pct"]) == pytest.approx(100, abs=5)
    assert rep.perturbed_forecast != rep.baseline_forecast
    s = rep.summary()
    assert s["relative_deviation"] == pytest.approx(
        abs(rep.perturbed_forecast - rep.baseline_forecast) / rep.baseline_forecast)


def test_sensitivity_injection_inside_corpus_rebalances(corpus):
    spec = pipeline.InjectionSpec(dt.date(2022, 12, 10), dt.date(2022, 12, 10), 20000,
                                  (0.0, 0.0, 0.0, 1.0))
    rep = pipeline.run_sensitivity(corpus, spec, order=ORDER)
    day = rep.perturbed_days[0]
    rec = next(r for r in corpus if r.date == dt.date(2022, 12, 10))
    assert day["reported_results"] == rec.reported_results + 20000
    share = 20000 / (rec.reported_results + 20000)
    assert day["tries_pct"][6] == pytest.approx(
        (1 - share) * rec.tries_pct[6] + share * 100)


def test_sensitivity_errors(corpus):
    late = pipeline.InjectionSpec(dt.date(2023, 3, 5), dt.date(2023, 3, 6), 100,
                                  (0.25, 0.25, 0.25, 0.25))
    with pytest.raises(ValueError, match="target"):
        pipeline.run_sensitivity(corpus, late, order=ORDER)
    early = pipeline.InjectionSpec(dt.date(2021, 3, 5), dt.date(2021, 3, 6), 100,
                                   (0.25, 0.25, 0.25, 0.25))
    with pytest.raises(ValueError, match="modelled period"):
        pipeline.run_sensitivity(corpus, early, order=ORDER)
    with pytest.raises(ValueError):
        pipeline.InjectionSpec(dt.date(2023, 2, 1), dt.date(2023, 2, 2), -1,
                               (0.25, 0.25, 0.25, 0.25))
    with pytest.raises(ValueError):
        pipeline.InjectionSpec(dt.date(2023, 2, 1), dt.date(2023, 2, 2), 1,
                               (0.5, 0.25, 0.25, 0.25))


def test_word_models(corpus):
    data = pipeline.word_data(corpus)
    assert data.matrix().shape == (359, 16)
    assert data.matrix(pipeline.BASIC_COLUMNS).shape == (359, 11)
    assert data.averages.shape == (359,)
    model, _ = neural.fit_scaled(data.matrix()[:300], data.targets[:300], seed=0,
                                 config=FAST)
    diff, scores, summaries = pipeline.difficulty_levels(data, 2, 4)
    pred = pipeline.predict_word(model, data, "eerie", pipeline.TARGET_DATE, diff)
    assert sum(pred.prediction.pct) == pytest.approx(100, abs=1e-6)
    assert 1 <= pred.level <= diff.k
    s = pred.summary()
    assert s["day_index"] == 419 and s["word"] == "eerie"
    assert sum(x.word_count for x in summaries) == 359
    assert set(scores) == {2, 3, 4}
