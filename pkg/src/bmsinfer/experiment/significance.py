"""Welch two-sample t-test used to mark significantly better table cells."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import stdtr

from ..errors import TooFewSamples


def welch_t_test(a, b) -> tuple[float, float, float]:
    """Two-sided Welch test; returns ``(t, dof, p)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise TooFewSamples("Welch's t-test needs at least two samples per group")
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    diff = a.mean() - b.mean()
    se2 = va + vb
    if se2 == 0.0:
        if diff == 0.0:
            return 0.0, float("nan"), 1.0
        return math.copysign(math.inf, diff), float("nan"), 0.0
    t = diff / math.sqrt(se2)
    dof = se2 ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    p = 2.0 * float(stdtr(dof, -abs(t)))
    return float(t), float(dof), min(1.0, p)


def significance_mark(a, b, alpha: float = 0.05) -> bool:
    """True when ``a`` has the larger mean and the difference is significant at ``alpha``."""
    t, _, p = welch_t_test(a, b)
    return bool(p < alpha and np.mean(a) > np.mean(b))
