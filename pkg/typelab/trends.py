"""Trend classification for windowed partial sums.

Every convergence or divergence verdict in the package goes through
:func:`classify`, so the rule lives in exactly one place.
"""
import enum
import math

import numpy as np

from typelab.constants import DEFAULTS
from typelab.exceptions import ValidationError

_TREND = DEFAULTS["trend"]


class Trend(str, enum.Enum):
    """Verdict of the window rule."""

    CONVERGED = "converged"
    GROWING = "growing"
    INCONCLUSIVE = "inconclusive"


def classify_terms(terms, factor=None):
    """Classify a sequence of nonnegative increments.

    Converged: each of the last three terms is at most ``1/factor`` of its
    predecessor. Growing: the first of them is positive and each later one is
    at least ``factor`` times its predecessor.
    """
    factor = _TREND["factor"] if factor is None else factor
    tail = [abs(float(t)) for t in terms][-3:]
    if len(tail) < 3:
        return Trend.INCONCLUSIVE
    if any(math.isnan(t) for t in tail):
        return Trend.INCONCLUSIVE
    if math.isinf(tail[-1]):
        return Trend.GROWING
    if all(later * factor <= earlier for earlier, later in zip(tail, tail[1:])):
        return Trend.CONVERGED
    if tail[0] > 0 and all(later >= factor * earlier for earlier, later in zip(tail, tail[1:])):
        return Trend.GROWING
    return Trend.INCONCLUSIVE


def classify(partials, factor=None):
    """Classify partial sums by their increments; needs at least four partials."""
    values = [float(p) for p in partials]
    if len(values) < _TREND["min_partials"]:
        return Trend.INCONCLUSIVE
    if math.isinf(values[-1]):
        return Trend.GROWING
    increments = [b - a for a, b in zip(values, values[1:])]
    return classify_terms(increments, factor)


def combine(geometric, logarithmic):
    """Merge verdicts from a geometric and a logarithmic ladder.

    Convergence is only read from the geometric ladder; growth on either
    ladder is divergence evidence.
    """
    if geometric is Trend.CONVERGED:
        return Trend.CONVERGED
    if Trend.GROWING in (geometric, logarithmic):
        return Trend.GROWING
    return Trend.INCONCLUSIVE


def geometric_ladder(top, ratio=None, count=None):
    """Windows ``top / ratio**(count-1), ..., top / ratio, top``."""
    ratio = _TREND["ladder_ratio"] if ratio is None else ratio
    count = _TREND["ladder_count"] if count is None else count
    return [float(top) / ratio ** (count - 1 - j) for j in range(count)]


def log_ladder(top, count=None, base=3.0):
    """Windows whose logarithms grow by ``base``: ``top**(1/base**(count-1-j))``."""
    count = _TREND["ladder_count"] if count is None else count
    if top <= 1.0:
        raise ValidationError("a logarithmic ladder needs top > 1")
    return [float(top) ** (1.0 / base ** (count - 1 - j)) for j in range(count)]


def loglog_slope(x, y):
    """Least-squares slope of log|y| against log x over the samples with y != 0."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(keep) < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def trend_record(windows, partials, verdict):
    """Evidence dictionary stored on certificates."""
    return {
        "windows": [float(w) for w in windows],
        "partials": [float(p) for p in partials],
        "trend": Trend(verdict).value,
    }
