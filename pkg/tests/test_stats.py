from __future__ import annotations

import statistics

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bmsinfer.errors import TooShort
from bmsinfer.stats import DF_FIELDS, describe, df_matrix, stationarity_ordinal


def _reference_score(x, stable=0.5, unstable=2.0):
    x = list(map(float, x))
    n = len(x)
    cut = n // 3
    segs = [x[:cut], x[cut:2 * cut], x[2 * cut:]]
    means = [statistics.fmean(s) for s in segs]
    varis = [statistics.pvariance(s) for s in segs]
    gvar = statistics.pvariance(x)
    dm = (max(means) - min(means)) / (gvar ** 0.5 + 1e-12)
    dv = (max(varis) - min(varis)) / (gvar + 1e-12)
    if dm > unstable or dv > unstable:
        return 0
    if dm < stable and dv < stable:
        return 2
    return 1


def _moments(x):
    x = [float(v) for v in x]
    n = len(x)
    mu = sum(x) / n
    m2 = sum((v - mu) ** 2 for v in x) / n
    m3 = sum((v - mu) ** 3 for v in x) / n
    m4 = sum((v - mu) ** 4 for v in x) / n
    return mu, m2, m3 / m2 ** 1.5, m4 / m2 ** 2 - 3


def test_constant_series():
    d = describe(np.array([5.0, 5, 5, 5]))
    assert (d.mean, d.std, d.skewness, d.kurtosis) == (5.0, 0.0, 0.0, 0.0)
    assert d.stationarity == 2


def test_hand_arithmetic():
    d = describe(np.array([1.0, 2, 3, 4]))
    assert d.mean == 2.5
    assert d.variance == pytest.approx(1.25)


def test_normal_moments_match_oracle():
    x = np.random.default_rng(0).standard_normal(10_000)
    d = describe(x)
    mu, m2, skew, kurt = _moments(x)
    assert d.mean == pytest.approx(mu, rel=1e-9, abs=1e-12)
    assert d.variance == pytest.approx(m2, rel=1e-9)
    assert d.skewness == pytest.approx(skew, rel=1e-9, abs=1e-12)
    assert d.kurtosis == pytest.approx(kurt, rel=1e-9, abs=1e-12)
    assert abs(d.skewness) < 0.1 and abs(d.kurtosis) < 0.2


def test_too_short():
    with pytest.raises(TooShort):
        describe(np.array([1.0, 2, 3]))
    with pytest.raises(TooShort):
        stationarity_ordinal(np.arange(29.0))


def test_vector_layout():
    d = describe(np.arange(40.0))
    arr = d.to_array()
    assert arr.shape == (6,)
    assert list(arr) == [getattr(d, f) for f in DF_FIELDS]
    assert DF_FIELDS == ("mean", "std", "variance", "stationarity", "kurtosis", "skewness")
    assert d.variance == pytest.approx(d.std ** 2, rel=1e-9)


def test_stationarity_examples():
    assert stationarity_ordinal(np.full(90, 3.0)) == 2
    assert stationarity_ordinal(np.arange(1000.0)) == 0
    assert _reference_score(np.arange(1000.0)) == 0


def test_white_noise_is_stationary():
    hits = 0
    for seed in range(100):
        x = np.random.default_rng(seed).standard_normal(3000)
        got = stationarity_ordinal(x)
        assert got == _reference_score(x)
        hits += got == 2
    assert hits >= 99


def test_matches_reference_on_mixed_signals():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(30, 400))
        x = rng.standard_normal(n) * rng.uniform(0.1, 3) + np.linspace(0, rng.uniform(-4, 4), n)
        x[n // 2:] *= rng.uniform(0.5, 2.5)
        assert stationarity_ordinal(x) == _reference_score(x)


series = arrays(np.float64, st.integers(30, 120), elements=st.floats(-100, 100))


@settings(max_examples=60, deadline=None)
@given(series, st.floats(-1e3, 1e3))
def test_shift_changes_only_mean(x, c):
    assume(np.ptp(x) > 1e-3)
    a, b = describe(x), describe(x + c)
    assert b.mean == pytest.approx(a.mean + c, abs=1e-9 * (1 + abs(c)))
    for f in ("std", "variance", "skewness", "kurtosis"):
        assert getattr(b, f) == pytest.approx(getattr(a, f), rel=1e-6, abs=1e-6)
    assert b.stationarity == a.stationarity


@settings(max_examples=60, deadline=None)
@given(series, st.sampled_from([0.25, 0.5, 2.0, 4.0, 8.0]))
def test_positive_scaling(x, alpha):
    assume(np.ptp(x) > 1e-3)
    a, b = describe(x), describe(alpha * x)
    assert b.std == pytest.approx(alpha * a.std, rel=1e-9)
    assert b.variance == pytest.approx(alpha ** 2 * a.variance, rel=1e-9)
    assert b.skewness == pytest.approx(a.skewness, rel=1e-9, abs=1e-9)
    assert b.kurtosis == pytest.approx(a.kurtosis, rel=1e-9, abs=1e-9)
    assert b.stationarity == a.stationarity


@settings(max_examples=60, deadline=None)
@given(series, st.sampled_from([-4.0, -1.0, -0.5, 0.5, 2.0]), st.sampled_from([-8.0, 0.0, 16.0]))
def test_stationarity_affine_invariant(x, alpha, c):
    assert stationarity_ordinal(alpha * x + c) == stationarity_ordinal(x)


def test_df_matrix_shape(corpus):
    X = df_matrix(corpus.series[:7])
    assert X.shape == (7, 6)
    assert np.array_equal(X[3], describe(corpus.series[3]).to_array())
