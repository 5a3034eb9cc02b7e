"""Property-based and seeded-sweep checks of the numerical invariants."""
import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.signal import lfilter

from wordlecast.dataset import clean_corpus, parse_dataset, serialize_corpus
from wordlecast.difficulty import avg_tries, classify, kmeans_1d, silhouette
from wordlecast.neural import gradient_check, init_mlp, predict_proba
from wordlecast.timeseries import acf, adf_test, pacf

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def series_strategy(min_size=12, max_size=80):
    return arrays(np.float64, st.integers(min_size, max_size), elements=finite).filter(
        lambda x: np.ptp(x) > 1e-3 * max(1.0, np.abs(x).max()))


@given(series_strategy(), st.floats(0.01, 100), st.floats(-1e4, 1e4),
       st.sampled_from([1, -1]))
def test_acf_pacf_affine_invariant(x, a, b, sign):
    lag = min(5, x.size // 2 - 1)
    y = sign * a * x + b
    np.testing.assert_allclose(acf(y, lag), acf(x, lag), atol=1e-9)
    np.testing.assert_allclose(pacf(y, lag), pacf(x, lag), atol=1e-9)


@given(series_strategy())
def test_pacf_first_equals_acf_first(x):
    assert pacf(x, 1)[0] == pytest.approx(acf(x, 1)[1], abs=1e-9)


@given(series_strategy(min_size=30))
def test_correlogram_bounds(x):
    r = acf(x, 10)
    assert r[0] == 1.0
    assert np.all(np.abs(r) <= 1 + 1e-12)
    assert np.all(np.abs(pacf(x, 10)) <= 1 + 1e-9)


def test_adf_verdicts_over_seeds():
    walk_ok = ar_ok = 0
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        walk_ok += not adf_test(np.cumsum(rng.normal(size=500))).reject
        ar = lfilter([1.0], [1.0, -0.3], rng.normal(size=700))[200:]
        ar_ok += adf_test(ar).reject
    assert walk_ok >= 19 and ar_ok >= 19


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(1, 12), min_size=1, max_size=3),
       arrays(np.float64, (5, 4), elements=st.floats(-50, 50)))
def test_network_outputs_are_distributions(seed, hidden, X):
    model = init_mlp((4, *hidden, 7), seed)
    P = 100 * predict_proba(model, X)
    assert np.all(P >= 0)
    np.testing.assert_allclose(P.sum(axis=1), 100, atol=1e-6)
    for row in P:
        assert 1 <= avg_tries(row) <= 7


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 6))
def test_gradient_check_random_models(seed, h1, h2):
    rng = np.random.default_rng(seed)
    model = init_mlp((3, h1, h2, 7), seed)
    x = rng.uniform(size=(2, 3))
    t = rng.dirichlet(np.ones(7), size=2)
    assert gradient_check(model, x, t) < 1e-4


def _brute(x, k):
    xs = np.sort(x)
    best = np.inf
    for cuts in itertools.combinations(range(1, xs.size), k - 1):
        best = min(best, sum(float(((p - p.mean()) ** 2).sum())
                             for p in np.split(xs, cuts)))
    return best


@pytest.mark.parametrize("seed", range(50))
def test_kmeans_exact_on_small_instances(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 13))
    x = rng.choice([rng.normal(0, 1, n), rng.gamma(1.5, 2.0, n),
                    rng.integers(0, 6, n).astype(float)])
    distinct = np.unique(x).size
    for k in range(1, min(distinct, 6) + 1):
        assert kmeans_1d(x, k).wcss <= _brute(x, k) + 1e-9


@given(arrays(np.float64, st.integers(3, 40), elements=st.floats(1, 7)),
       st.integers(2, 4))
def test_silhouette_bounds(x, k):
    assume(np.unique(x).size >= k)
    model = kmeans_1d(x, k)
    assume(len(set(model.assignments)) >= 2)
    rep = silhouette(x, model.assignments)
    assert all(-1 - 1e-12 <= s <= 1 + 1e-12 for s in rep.per_point)
    assert rep.mean == pytest.approx(np.mean(rep.per_point))


@given(st.floats(0, 10), st.lists(st.floats(1, 7), min_size=1, max_size=8, unique=True))
def test_classify_is_nearest(avg, cents):
    cents = sorted(cents)
    level = classify(avg, cents)
    d = [abs(avg - c) for c in cents]
    assert d[level - 1] == pytest.approx(min(d), abs=1e-9)


def test_cleaning_idempotent(synthetic_text):
    cleaned, report = clean_corpus(parse_dataset(synthetic_text))
    again, second = clean_corpus(parse_dataset(serialize_corpus(cleaned)))
    assert again == cleaned
    assert second.empty
    assert not report.empty
