"""Counting functions of symmetric point sets and the Krein-class exclusion test."""
import logging
import math
from dataclasses import dataclass

import numpy as np

from typelab.certificate import Certificate, Direction, Verdict
from typelab.exceptions import ValidationError

logger = logging.getLogger(__name__)

CHECKPOINT_DECADES = (3, 2, 1, 0)


@dataclass(frozen=True)
class CountingProfile:
    """n(t) = #{|lambda| <= t} and N(R) = integral_1^R n(t)/t dt on a grid."""

    grid: np.ndarray
    n: np.ndarray
    N: np.ndarray
    c: float | None = None

    def rows(self):
        return [{"t": float(t), "n": int(n), "N": float(N)} for t, n, N in zip(self.grid, self.n, self.N)]


class CountingFunction:
    """Exact step-function evaluation over a sorted set of absolute values."""

    def __init__(self, points):
        self.moduli = np.sort(np.abs(np.asarray(points, dtype=float).reshape(-1)))
        logs = np.log(np.maximum(self.moduli, 1.0))
        self._log_prefix = np.concatenate(([0.0], np.cumsum(logs)))

    def n(self, t):
        return np.searchsorted(self.moduli, np.asarray(t, dtype=float), side="right")

    def N(self, R):
        """n(R) log R - sum over |lambda| <= R of log max(1, |lambda|), and 0 below R = 1."""
        R = np.asarray(R, dtype=float)
        count = self.n(R)
        with np.errstate(divide="ignore"):
            value = count * np.log(np.maximum(R, 1.0)) - self._log_prefix[count]
        return np.where(R >= 1.0, value, 0.0)


def counting(points, grid, c=None):
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValidationError("counting grid must be nondecreasing")
    function = CountingFunction(points)
    return CountingProfile(grid, function.n(grid), function.N(grid), c)


def _window_maxima(function, c, edges):
    """Maximum of n(t) - 2t/c on each window; attained at a jump or at the window start."""
    maxima = []
    for lo, hi in zip(edges, edges[1:]):
        jumps = function.moduli[(function.moduli >= lo) & (function.moduli <= hi)]
        candidates = np.concatenate(([lo], jumps))
        maxima.append(float(np.max(function.n(candidates) - 2.0 * candidates / c)))
    return maxima


def krein_exclusion(points, c, A_list, R_max, drop_min=0.5):
    """Certificate that the points cannot carry the zeros of a Krein-class function of type pi/c.

    n(t) - 2t/c must fall by at least ``drop_min`` between successive decade
    windows. For each A, N(R) - 2R/c + A log R is either seen to decrease over
    the top decade, or the radius where n(t) - 2t/c < -A is extrapolated from
    the fitted decrease.
    """
    if c <= 0:
        raise ValidationError("lattice rate c must be positive")
    function = CountingFunction(points)
    anchor = "Krein-class zero sets are excluded when n(t) - 2t/c tends to -infinity"
    params = {"c": c, "A": list(A_list), "R_max": R_max, "drop_min": drop_min}
    if R_max < 1000:
        return Certificate(statement="krein_exclusion", anchor=anchor, verdict=Verdict.INCONCLUSIVE, params=params,
                           evidence={"reason": "R_max below 1000 leaves no decade windows"}, radius=R_max)
    if function.moduli.size == 0 or function.moduli[-1] < R_max:
        raise ValidationError(f"points do not cover [-{R_max}, {R_max}]")
    edges = [R_max / 10.0 ** d for d in CHECKPOINT_DECADES]
    maxima = _window_maxima(function, c, edges)
    drops = [a - b for a, b in zip(maxima, maxima[1:])]
    decreasing = all(d >= drop_min for d in drops)
    slope, intercept = np.polyfit(np.log(edges[:-1]), maxima, 1)
    top, below = edges[-1], edges[-2]

    def expression(R, A):
        return float(function.N(R)) - 2.0 * R / c + A * math.log(R)

    per_a = []
    for A in A_list:
        observed = expression(top, A) < expression(below, A)
        crossover = math.exp((-A - intercept) / slope) if decreasing and slope < 0 else math.inf
        per_a.append({
            "A": A,
            "observed_decrease": observed,
            "crossover_radius": crossover,
            "passes": observed or (decreasing and math.isfinite(crossover)),
        })
    holds = decreasing and all(entry["passes"] for entry in per_a)
    logger.info("krein exclusion over R <= %g: window maxima %s", R_max, maxima)
    return Certificate(
        statement="krein_exclusion",
        anchor=anchor,
        verdict=Verdict.HOLDS if holds else Verdict.FAILS,
        direction=Direction.INFINITE,
        value=float(slope),
        params=params,
        evidence={
            "windows": edges,
            "window_maxima": maxima,
            "drops": drops,
            "fitted_slope": float(slope),
            "fitted_intercept": float(intercept),
            "per_A": per_a,
        },
        radius=R_max,
    )
