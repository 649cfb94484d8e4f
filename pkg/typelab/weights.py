"""Weights W: R -> (0, inf], the C0(W) seminorm, and the constructive weight transforms."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from typelab.constants import DEFAULTS
from typelab.exceptions import GridError, ValidationError
from typelab.functions import TrialFunction
from typelab.perturbation import interval_constant
from typelab.trends import classify, trend_record

logger = logging.getLogger(__name__)

_WEIGHTS = DEFAULTS["weights"]


class Weight:
    """Lower semicontinuous weight with the power-shift family W_t(x) = W(x)(1+|x|)^{-t}.

    ``support`` marks a discrete set outside of which the weight is infinite.
    """

    def __init__(self, evaluator, name, params=None, support=None, shift=Fraction(0), log_evaluator=None):
        self._evaluator = evaluator
        self._log_evaluator = log_evaluator
        self.name = name
        self.params = dict(params or {})
        self.support = None if support is None else np.sort(np.asarray(support, dtype=float))
        self.shift = Fraction(shift)

    def __repr__(self):
        return f"<Weight {self.name} shift={float(self.shift)}>"

    def base(self, x):
        x = np.asarray(x, dtype=float)
        values = np.asarray(self._evaluator(x), dtype=float) * np.ones_like(x)
        if self.support is not None:
            idx = np.clip(np.searchsorted(self.support, x), 0, max(self.support.size - 1, 0))
            on_support = self.support.size > 0 and self.support[idx] == x
            values = np.where(on_support, values, np.inf)
        return values

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        values = self.base(x)
        if self.shift:
            values = values * (1.0 + np.abs(x)) ** (-float(self.shift))
        return values

    def log(self, x):
        """log W(x), in closed form where the family provides one."""
        x = np.asarray(x, dtype=float)
        if self._log_evaluator is None or self.discrete:
            with np.errstate(divide="ignore"):
                return np.log(self(x))
        values = np.asarray(self._log_evaluator(x), dtype=float) * np.ones_like(x)
        if self.shift:
            values = values - float(self.shift) * np.log1p(np.abs(x))
        return values

    def shifted(self, t):
        """W_t; shifts accumulate exactly so (W_t)_s is W_{t+s}."""
        return Weight(self._evaluator, self.name, self.params, self.support, self.shift + Fraction(t),
                      self._log_evaluator)

    @property
    def discrete(self):
        return self.support is not None

    def growth_check(self, s, radii):
        """Trend of (1+R)^s W(R): growing means the weight condition holds at exponent s."""
        radii = np.asarray(radii, dtype=float)
        values = (1.0 + radii) ** s * self(radii)
        trend = classify(values)
        return trend_record(radii, values, trend)

    def samples(self, grid):
        grid = np.asarray(grid, dtype=float)
        values = self(grid)
        return {"grid": grid.tolist(), "values": np.where(np.isfinite(values), values, -1.0).tolist(),
                "infinity_outside": self.discrete}

    def serialize(self):
        return {"kind": self.name, **self.params, "shift": float(self.shift)}


def constant(value=1.0):
    value = float(value)
    if value <= 0:
        raise ValidationError("a weight must be positive")
    return Weight(lambda x: np.full_like(x, value), "constant", {"value": value},
                  log_evaluator=lambda x: np.full_like(x, math.log(value)))


def power(exponent):
    exponent = float(exponent)
    return Weight(lambda x: (1.0 + np.abs(x)) ** exponent, "power", {"exponent": exponent},
                  log_evaluator=lambda x: exponent * np.log1p(np.abs(x)))


def exp_cap(rate):
    rate = float(rate)
    return Weight(lambda x: np.exp(rate * np.abs(x)), "exp_abs", {"rate": rate},
                  log_evaluator=lambda x: rate * np.abs(x))


def lattice(step=1.0, radius=1000.0, value=1.0):
    """Finite (equal to ``value``) only on step*Z within the radius."""
    n = math.floor(radius / step)
    support = step * np.arange(-n, n + 1, dtype=float)
    value = float(value)
    return Weight(lambda x: np.full_like(x, value), "lattice_indicator",
                  {"value": value, "step": step, "radius": radius}, support=support)


def sampled(grid, values, infinity_outside=False):
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.size != values.size or grid.size == 0:
        raise ValidationError("sampled weight needs one value per grid point")
    if np.any(values <= 0):
        raise ValidationError("a weight must be positive")
    params = {"grid": grid.tolist(), "values": values.tolist(), "infinity_outside": infinity_outside}
    if infinity_outside:
        lookup = dict(zip(grid.tolist(), values.tolist()))
        return Weight(lambda x: np.array([lookup.get(float(v), np.inf) for v in np.ravel(x)]).reshape(np.shape(x)),
                      "sampled", params, support=grid)
    return Weight(lambda x: np.interp(x, grid, values), "sampled", params)


def weight_from_dict(data):
    kind = data["kind"]
    if kind == "constant":
        return constant(data.get("value", 1.0))
    if kind == "power":
        return power(data["exponent"])
    if kind == "exp_abs":
        return exp_cap(data["rate"])
    if kind == "lattice_indicator":
        return lattice(data.get("step", 1.0), data.get("radius", 1000.0), data.get("value", 1.0))
    if kind == "sampled":
        return sampled(data["grid"], data["values"], data.get("infinity_outside", False))
    raise ValidationError(f"{kind!r} is not a weight kind")


# -- seminorm ------------------------------------------------------------------------


@dataclass(frozen=True)
class SeminormReport:
    value: float
    argmax: float

    def serialize(self):
        return {"value": self.value, "argmax": self.argmax}


def c0_seminorm(f, W, grid):
    """sup over the grid of |f|/W, with the maximising point."""
    grid = np.asarray(grid, dtype=float)
    weights = W(grid)
    if np.any(weights <= 0):
        raise ValidationError(f"weight vanishes at x = {grid[weights <= 0][0]}")
    with np.errstate(invalid="ignore"):
        ratio = np.abs(np.asarray(f(grid))) / weights
    ratio = np.where(np.isinf(weights), 0.0, ratio)
    at = int(np.argmax(ratio))
    return SeminormReport(float(ratio[at]), float(grid[at]))


# -- weight transform ------------------------------------------------------------------


@dataclass(frozen=True)
class TransformReport:
    weight: Weight
    k1: float
    grid: np.ndarray
    values: np.ndarray
    l2_evidence: dict = field(default_factory=dict)

    def serialize(self):
        return {"k1": self.k1, "points": int(self.grid.size), "l2": self.l2_evidence}


def _windowed_minimum(shifted, grid, grid_values, delta, k1, centres):
    centres = np.atleast_1d(np.asarray(centres, dtype=float))
    half = k1 * np.exp(-delta * np.abs(centres))
    out = np.asarray(shifted(centres), dtype=float).copy()
    if shifted.discrete:
        points = shifted.support
        point_values = shifted(points)
        lo = np.searchsorted(points, centres - half, side="left")
        hi = np.searchsorted(points, centres + half, side="right")
    else:
        spacing = np.gradient(grid) if grid.size > 1 else np.zeros(1)
        local = np.interp(centres, grid, spacing)
        points, point_values = grid, grid_values
        lo = np.searchsorted(points, centres - half + local, side="left")
        hi = np.searchsorted(points, centres + half - local, side="right")
    for i, (start, stop) in enumerate(zip(lo, hi)):
        if stop > start:
            out[i] = min(out[i], float(np.min(point_values[start:stop])))
    return np.minimum(out, np.exp(delta * np.abs(centres) / 3.0))


def weight_transform(W_tilde, delta, p, grid, mu=None, windows=None):
    """W(x) = min(inf over k1 I_x of W_tilde_p, e^{delta|x|/3}) from grid samples.

    With ``mu`` and ``windows`` also reports the trend of the partial L2(mu) norms of W.
    """
    if delta <= 0 or p < 0:
        raise ValidationError("delta must be positive and p nonnegative")
    grid = np.unique(np.asarray(grid, dtype=float))
    k1 = interval_constant(delta)
    shifted = W_tilde.shifted(p)
    if not shifted.discrete and grid.size > 1:
        reach = float(np.max(np.abs(grid)))
        spacing = float(np.max(np.diff(grid)))
        half = k1 * math.exp(-delta * reach)
        if half < _WEIGHTS["min_samples_per_half_window"] * spacing:
            raise GridError(f"half-window {half:.3g} at |x| = {reach:g} holds fewer than "
                            f"{_WEIGHTS['min_samples_per_half_window']} grid spacings of {spacing:.3g}")
    grid_values = shifted(grid)

    def evaluate(x):
        return _windowed_minimum(shifted, grid, grid_values, delta, k1, x)

    weight = Weight(evaluate, "transformed", {"delta": delta, "p": p, "source": W_tilde.serialize()})
    values = evaluate(grid)
    evidence = {}
    if mu is not None and windows:
        def squared(x):
            return evaluate(x) ** 2

        partials = [mu.integrate(squared, radius=w) for w in windows]
        evidence = trend_record(windows, partials, classify(partials))
    logger.info("weight transform (delta=%g, p=%g) over %d points", delta, p, grid.size)
    return TransformReport(weight, k1, grid, values, evidence)


# -- Bakan's weight -----------------------------------------------------------------------


@dataclass(frozen=True)
class BakanReport:
    weight: Weight
    chain: tuple
    residual_tags: tuple

    @property
    def chain_holds(self):
        return all(entry["passes"] for entry in self.chain)

    def serialize(self):
        return {"chain": list(self.chain), "chain_holds": self.chain_holds, "residual_tags": list(self.residual_tags)}


def bakan_weight(f, approximants, n, K, s_values=(), grid=None, residual_tags=(), f_at_i=None):
    """W(x) = [(1+|x|^n)^{-1} + sum_{k<=K} 4^k |h_k(x) - f(x)/(x-i)|^2 (1+|x|)^{2k}]^{1/2}.

    For every s in ``s_values`` and s <= k <= K the grid seminorm
    ||h_k - f/(x-i)||_{W_s} is compared against 2^{-k}. Trial functions only
    live on the real line, so for them ``f_at_i`` must be given.
    """
    K = int(K)
    if K == 0 and n < 1:
        raise ValidationError("K = 0 needs n >= 1")
    if len(approximants) < K:
        raise ValidationError(f"{K} approximants needed, {len(approximants)} given")
    if f_at_i is None:
        if isinstance(f, TrialFunction):
            raise ValidationError(f"{f.name} is evaluated on the real line only; give f(i)")
        f_at_i = complex(np.asarray(f(np.asarray(1j))))
    if complex(f_at_i) == 0:
        raise ValidationError("f must not vanish at i")
    hs: list[Callable] = list(approximants[:K])

    def difference(k, x):
        return np.asarray(hs[k - 1](x), dtype=complex) - np.asarray(f(x), dtype=complex) / (x - 1j)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        total = 1.0 / (1.0 + np.abs(x) ** n)
        for k in range(1, K + 1):
            total = total + 4.0 ** k * np.abs(difference(k, x)) ** 2 * (1.0 + np.abs(x)) ** (2 * k)
        return np.sqrt(total)

    weight = Weight(evaluate, "bakan", {"n": n, "K": K})
    chain = []
    if grid is not None:
        grid = np.asarray(grid, dtype=float)
        for s in s_values:
            shifted = weight.shifted(s)
            for k in range(max(int(math.ceil(s)), 1), K + 1):
                report = c0_seminorm(lambda x, k=k: np.abs(difference(k, x)), shifted, grid)
                chain.append({"s": s, "k": k, "seminorm": report.value, "bound": 2.0 ** -k,
                              "passes": report.value <= 2.0 ** -k})
    return BakanReport(weight, tuple(chain), tuple(residual_tags))
