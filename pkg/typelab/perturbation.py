"""Zero perturbation of canonical products and pointwise bounds on B, B', B''."""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, loggamma

from typelab.certificate import Verdict
from typelab.exceptions import ValidationError
from typelab.products import eval_product, TailPolicy

logger = logging.getLogger(__name__)

CIRCLE_POINTS = 16
_CHUNK = 256


def interval_constant(delta):
    """k1 with y in I_x implying 2 I_x inside k1 I_y."""
    return 3.0 * math.exp(delta)


@dataclass(frozen=True)
class ShiftReport:
    product: object
    k1: float
    shifted: tuple
    deviations: tuple
    fitted_rate: float

    def serialize(self):
        return {
            "k1": self.k1,
            "shifted_zeros": [float(x) for x in self.shifted],
            "max_deviation": [float(d) for d in self.deviations],
            "fitted_rate": self.fitted_rate,
            "zeros": self.product.count,
        }


def shift_zeros(B, targets, M, delta):
    """B_1: the product over the zeros lambda > M, each moved to ``targets[lambda]`` (mirrored on the negative side).

    Zeros at or below M, the origin included when M >= 0, are left out of B_1.

    The deviation |(1 - z/zeta)/(1 - z/lambda) - 1| is sampled on the circle of
    radius e^{-delta |lambda|/3} about each moved zero, and its logarithm is
    fitted linearly against |lambda|.
    """
    if delta <= 0:
        raise ValidationError("delta must be positive")
    k1 = interval_constant(delta)
    zeros = B.positive_zeros[B.positive_zeros > M].copy()
    if zeros.size == 0:
        raise ValidationError(f"no zeros of {B.name} lie beyond M = {M:g}")
    moved = []
    lookup = {float(k): float(v) for k, v in targets.items()}
    for i, lam in enumerate(zeros.tolist()):
        if lam not in lookup:
            continue
        zeta = lookup[lam]
        if abs(zeta - lam) > k1 * math.exp(-delta * lam):
            raise ValidationError(f"target {zeta} for lambda = {lam:g} leaves k1*I_lambda")
        zeros[i] = zeta
        if zeta != lam:
            moved.append((lam, zeta))
    if np.any(np.diff(zeros) <= 0) or np.any(zeros <= 0):
        raise ValidationError("shifted zeros must stay positive and simple")
    product = B.replaced(zeros, name=f"{B.name}_shifted", zero_at_origin=B.zero_at_origin and M < 0,
                         normalization=1.0)
    angles = 2.0 * math.pi * np.arange(CIRCLE_POINTS) / CIRCLE_POINTS
    deviations = []
    for lam, zeta in moved:
        radius = math.exp(-delta * lam / 3.0)
        z = lam + radius * np.exp(1j * angles)
        deviations.append(float(np.max(np.abs(z) * abs(zeta - lam) / (abs(zeta) * radius))))
    rate = math.nan
    if len(moved) >= 2:
        lams = np.array([lam for lam, _ in moved])
        devs = np.array(deviations)
        keep = devs > 0
        if np.count_nonzero(keep) >= 2:
            rate = float(np.polyfit(lams[keep], np.log(devs[keep]), 1)[0])
    logger.info("shifted %d zeros of %s; fitted deviation rate %s", len(moved), B.name, rate)
    return ShiftReport(product, k1, tuple(z for _, z in moved), tuple(deviations), rate)


def _first_derivative(B, x):
    """B'(x) on real points by the product rule around the nearest zero."""
    zeros = B.positive_zeros
    exponent = 1 if B.zero_at_origin else 0
    out = np.empty(x.size)
    for start in range(0, x.size, _CHUNK):
        xs = x[start:start + _CHUNK]
        nearest = np.clip(np.searchsorted(zeros, np.abs(xs)), 0, zeros.size - 1)
        below = np.clip(nearest - 1, 0, zeros.size - 1)
        pick = np.where(np.abs(np.abs(xs) - zeros[below]) < np.abs(np.abs(xs) - zeros[nearest]), below, nearest)
        ratio = (xs[:, None] / zeros[None, :]) ** 2
        rows = np.arange(xs.size)
        factor = 1.0 - ratio[rows, pick]
        ratio[rows, pick] = 0.0
        others = 1.0 - ratio
        sign = np.prod(np.sign(others), axis=1)
        log_rest = np.sum(np.log(np.abs(others)), axis=1)
        terms = -2.0 * xs[:, None] / (zeros[None, :] ** 2 * others)
        terms[rows, pick] = 0.0
        log_derivative = np.sum(terms, axis=1)
        rest = sign * np.exp(log_rest)
        if B.tail_period is not None:
            h = B.tail_period
            for last in zeros[-B.tail_residues:]:
                a = 1.0 + last / h
                log_tail = (2.0 * np.real(_loggamma(a)) - np.real(_loggamma(a - xs / h))
                            - np.real(_loggamma(a + xs / h)))
                rest = rest * np.exp(log_tail)
                log_derivative = log_derivative + (digamma(a - xs / h) - digamma(a + xs / h)) / h
        power = xs ** exponent
        d_power = float(exponent) * np.ones_like(xs)
        d_factor = -2.0 * xs / zeros[pick] ** 2
        out[start:start + xs.size] = B.normalization * rest * (
            d_power * factor + power * d_factor + power * factor * log_derivative
        )
    return out


def _loggamma(values):
    return loggamma(np.asarray(values, dtype=complex))


@dataclass(frozen=True)
class BoundsReport:
    threshold: float | None
    failures: int
    empirical_c: float
    gap_argmin: float
    c_required: float | None

    @property
    def m6_holds(self):
        return self.empirical_c > 0 and (self.c_required is None or self.empirical_c >= self.c_required)

    def serialize(self):
        return {
            "threshold_C": self.threshold,
            "failures": self.failures,
            "empirical_c": self.empirical_c,
            "gap_argmin": self.gap_argmin,
            "c_required": self.c_required,
            "separation": (Verdict.HOLDS if self.m6_holds else Verdict.FAILS).value,
        }


def lf_bounds_check(B, delta, x_grid, c_required=None):
    """Smallest grid |x| beyond which |B|+|B'|+|B''| < e^{delta|x|/5}, and the separation constant."""
    x = np.sort(np.asarray(x_grid, dtype=float))
    if x.size == 0 or B.count == 0:
        raise ValidationError("lf bounds need a nonempty grid and zero set")
    if np.max(np.abs(x)) >= B.positive_zeros[-1]:
        raise ValidationError("grid must stay inside the stored zero range")
    policy = TailPolicy.ARITHMETIC_TAIL if B.tail_period is not None else TailPolicy.NONE
    values = np.array([abs(eval_product(B, float(t), tail_policy=policy).value) if not _is_zero(B, t) else 0.0
                       for t in x])
    first = _first_derivative(B, x)
    step = 1e-5 * np.maximum(1.0, np.abs(x))
    second = (_first_derivative(B, x + step) - _first_derivative(B, x - step)) / (2.0 * step)
    total = values + np.abs(first) + np.abs(second)
    failing = np.abs(x)[total >= np.exp(delta * np.abs(x) / 5.0)]
    moduli = np.unique(np.abs(x))
    if failing.size == 0:
        threshold = float(moduli[0])
    else:
        above = moduli[moduli > failing.max()]
        threshold = float(above[0]) if above.size else None
    zeros = B.all_zeros()
    gaps = np.diff(zeros)
    scale = np.exp(delta * np.minimum(np.abs(zeros[:-1]), np.abs(zeros[1:])) / 4.0)
    separated = gaps * scale
    at = int(np.argmin(separated)) if separated.size else 0
    report = BoundsReport(threshold, int(failing.size),
                          float(separated[at]) if separated.size else math.inf,
                          float(zeros[at]) if separated.size else math.nan, c_required)
    logger.info("lf bounds for %s: threshold C = %s, empirical c = %.4g", B.name, threshold, report.empirical_c)
    return report


def _is_zero(B, t):
    return (B.zero_at_origin and t == 0.0) or bool(np.any(B.positive_zeros == abs(t)))
