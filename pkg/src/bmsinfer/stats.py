"""Descriptive-statistics feature family (DF)."""

from __future__ import annotations

from dataclasses import astuple, dataclass

import numpy as np

from .errors import TooShort

DF_FIELDS = ("mean", "std", "variance", "stationarity", "kurtosis", "skewness")

MIN_DESCRIBE = 4
MIN_STATIONARITY = 30


@dataclass(frozen=True)
class DfVector:
    mean: float
    std: float
    variance: float
    stationarity: int
    kurtosis: float
    skewness: float

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=float)


def _segment_score(x: np.ndarray, stable: float, unstable: float) -> int:
    size = len(x) // 3
    segs = (x[:size], x[size:2 * size], x[2 * size:])
    means = np.array([s.mean() for s in segs])
    variances = np.array([s.var() for s in segs])
    drift_m = (means.max() - means.min()) / (x.std() + 1e-12)
    drift_v = (variances.max() - variances.min()) / (x.var() + 1e-12)
    if drift_m < stable and drift_v < stable:
        return 2
    if drift_m > unstable or drift_v > unstable:
        return 0
    return 1


def stationarity_ordinal(series, stable: float = 0.5, unstable: float = 2.0) -> int:
    """Ordinal stationarity score: 2 stable, 1 mild drift, 0 non-stationary.

    The series is cut into three contiguous segments (remainder to the last).
    Drift in segment means is measured in units of the global standard
    deviation, drift in segment variances in units of the global variance.
    """
    x = _values(series)
    if len(x) < MIN_STATIONARITY:
        raise TooShort(f"stationarity needs >= {MIN_STATIONARITY} points, got {len(x)}")
    return _segment_score(x, stable, unstable)


def describe(series, stable: float = 0.5, unstable: float = 2.0) -> DfVector:
    """Population moments plus the stationarity score of one series.

    Skewness is ``m3 / m2**1.5`` and kurtosis is the excess ``m4 / m2**2 - 3``.
    A constant series has zero spread and by convention zero skew and kurtosis.
    """
    x = _values(series)
    n = len(x)
    if n < MIN_DESCRIBE:
        raise TooShort(f"describe needs >= {MIN_DESCRIBE} points, got {n}")
    mean = float(x.mean())
    if np.ptp(x) == 0:
        return DfVector(mean, 0.0, 0.0, 2, 0.0, 0.0)
    dev = x - mean
    m2 = float(np.mean(dev ** 2))
    m3 = float(np.mean(dev ** 3))
    m4 = float(np.mean(dev ** 4))
    std = float(np.sqrt(m2))
    return DfVector(
        mean=mean,
        std=std,
        variance=m2,
        stationarity=_segment_score(x, stable, unstable),
        kurtosis=m4 / m2 ** 2 - 3.0,
        skewness=m3 / m2 ** 1.5,
    )


def df_matrix(series_list, stable: float = 0.5, unstable: float = 2.0) -> np.ndarray:
    return np.vstack([describe(s, stable, unstable).to_array() for s in series_list])
