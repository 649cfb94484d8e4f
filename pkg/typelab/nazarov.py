"""Distorted lattices X(cZ), their spectral measures and the smoothed Poisson test."""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

from typelab.certificate import Certificate, Direction, Verdict
from typelab.constants import DEFAULTS
from typelab.counting import krein_exclusion
from typelab.exceptions import ValidationError
from typelab.execution import STRICT
from typelab.measures import SpectralMeasure
from typelab.trends import (
    Trend, classify, classify_terms, combine, geometric_ladder, log_ladder, loglog_slope, trend_record,
)

logger = logging.getLogger(__name__)

_NAZAROV = DEFAULTS["nazarov"]
FAMILIES = ("identity", "arctan_shift", "arcsinh_shift", "linear")
_BISECTION_STEPS = 80


class GammaDiffeo:
    """Odd increasing map of the line with closed-form derivatives up to order four."""

    def __init__(self, family, beta=None):
        if family not in FAMILIES:
            raise ValidationError(f"unknown diffeomorphism family {family!r}")
        beta = {"identity": 0.0, "linear": 1.0}.get(family, 0.5) if beta is None else float(beta)
        if family == "arctan_shift" and not abs(beta) < 1:
            raise ValidationError("arctan_shift needs |beta| < 1")
        if family == "arcsinh_shift" and not beta > -1:
            raise ValidationError("arcsinh_shift needs beta > -1")
        if family == "linear" and not beta > 0:
            raise ValidationError("linear needs a positive slope")
        self.family = family
        self.beta = beta

    def __repr__(self):
        return f"<GammaDiffeo {self.family} beta={self.beta}>"

    @classmethod
    def from_dict(cls, data):
        return cls(data["family"], data.get("beta"))

    def serialize(self):
        return {"family": self.family, "beta": self.beta}

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "identity":
            return t.copy()
        if self.family == "linear":
            return self.beta * t
        if self.family == "arctan_shift":
            return t + self.beta * np.arctan(t)
        return t + self.beta * np.arcsinh(t)

    def derivative(self, t, order=1):
        t = np.asarray(t, dtype=float)
        if order < 1:
            return self(t)
        if order > 4:
            step = 1e-3 * np.maximum(1.0, np.abs(t))
            return (self.derivative(t + step, order - 1) - self.derivative(t - step, order - 1)) / (2.0 * step)
        if self.family == "identity":
            return np.ones_like(t) if order == 1 else np.zeros_like(t)
        if self.family == "linear":
            return np.full_like(t, self.beta) if order == 1 else np.zeros_like(t)
        s = 1.0 + t * t
        if self.family == "arctan_shift":
            terms = {
                1: 1.0 / s,
                2: -2.0 * t / s ** 2,
                3: (6.0 * t * t - 2.0) / s ** 3,
                4: 24.0 * t * (1.0 - t * t) / s ** 4,
            }
        else:
            terms = {
                1: s ** -0.5,
                2: -t * s ** -1.5,
                3: (2.0 * t * t - 1.0) * s ** -2.5,
                4: (9.0 * t - 6.0 * t ** 3) * s ** -3.5,
            }
        return (1.0 if order == 1 else 0.0) + self.beta * terms[order]

    def inverse(self, y):
        """Y = X^{-1} by bracketing bisection and two Newton polishes."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        width = np.ones_like(y)
        lo, hi = y - width, y + width
        for _ in range(200):
            low_bad = self(lo) > y
            high_bad = self(hi) < y
            if not (np.any(low_bad) or np.any(high_bad)):
                break
            width = width * 2.0
            lo = np.where(low_bad, y - width, lo)
            hi = np.where(high_bad, y + width, hi)
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            below = self(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        t = 0.5 * (lo + hi)
        for _ in range(2):
            t = t - (self(t) - y) / self.derivative(t)
        return t


class RescaledDiffeo:
    """t -> X(ct)/c, so that X(cZ) becomes a perturbation of Z."""

    def __init__(self, X, c):
        if c <= 0:
            raise ValidationError("c must be positive")
        self.X = X
        self.c = float(c)

    def __call__(self, t):
        return self.X(self.c * np.asarray(t, dtype=float)) / self.c

    def derivative(self, t, order=1):
        return self.c ** (order - 1) * self.X.derivative(self.c * np.asarray(t, dtype=float), order)

    def inverse(self, y):
        return self.X.inverse(self.c * np.asarray(y, dtype=float)) / self.c

    def serialize(self):
        return {**self.X.serialize(), "c": self.c}


# -- class checks -------------------------------------------------------------------------


def gamma_check(X, t_grid, k_max=None):
    """Certificate that X' -> 1 and that |X^(k)| decays with increasing fitted exponents."""
    k_max = _NAZAROV["k_max"] if k_max is None else int(k_max)
    t = np.sort(np.asarray(t_grid, dtype=float))
    values = X(t)
    if np.any(np.diff(values) <= 0):
        bad = t[1:][np.diff(values) <= 0][0]
        raise ValidationError(f"X is not increasing on the grid near t = {bad:g}")
    t_max = float(np.max(np.abs(t)))
    radii = geometric_ladder(t_max)
    deviations = np.abs(X.derivative(np.asarray(radii)) - 1.0)
    condition_one = classify_terms(deviations)
    fit_points = t[np.abs(t) >= 10.0]
    exponents = {}
    for k in range(2, k_max + 1):
        derivative = X.derivative(fit_points, k)
        if np.all(derivative == 0):
            exponents[k] = math.inf
        else:
            exponents[k] = -loglog_slope(np.abs(fit_points), derivative)
    ordered = [exponents[k] for k in sorted(exponents)]
    increasing = all(b > a or (math.isinf(a) and math.isinf(b)) for a, b in zip(ordered, ordered[1:]))
    positive = all(s > 0 for s in ordered)
    holds = condition_one is Trend.CONVERGED and increasing and positive
    return Certificate(
        statement="gamma_class",
        anchor="X'(t) -> 1 and X^(k)(t) = O(|t|^(-s_k)) with increasing s_k",
        verdict=Verdict.HOLDS if holds else Verdict.FAILS,
        params={"diffeo": X.serialize(), "k_max": k_max},
        evidence={
            "radii": radii,
            "derivative_deviation": deviations,
            "derivative_trend": condition_one.value,
            "fitted_exponents": {str(k): v for k, v in exponents.items()},
        },
        radius=t_max,
    )


def build_measure(X, c, K):
    """Atoms at X(ck) with masses X'(ck) for |k| <= K, mirrored so the measure is exactly symmetric."""
    if K < 0:
        raise ValidationError("K must be nonnegative")
    k = np.arange(1, int(K) + 1, dtype=float)
    positions = X(c * k)
    masses = X.derivative(c * k)
    if np.any(masses <= 0):
        raise ValidationError("X' must be positive on the lattice")
    origin_mass = float(X.derivative(np.zeros(1))[0])
    return SpectralMeasure(
        positions=np.concatenate((-positions[::-1], [0.0], positions)),
        masses=np.concatenate((masses[::-1], [origin_mass], masses)),
        symmetric=True,
    )


# -- smoothed Poisson summation -------------------------------------------------------------


def _ramp(u):
    """Smooth step from 1 at u <= 0 to 0 at u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(u < 1.0, np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)
        right = np.where(u > 0.0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
    return left / (left + right)


class SchwartzWindow:
    """phi with phi_hat = 1 on (-a, a), 0 outside (-b, b) and a smooth ramp in between."""

    def __init__(self, a, b, points=None, half_width=None, support_radius=None):
        if not 0 < a < b:
            raise ValidationError("window radii need 0 < a < b")
        self.a, self.b = float(a), float(b)
        points = int(points or _NAZAROV["fft_points"])
        half_width = float(half_width or _NAZAROV["fft_half_width"])
        self.support_radius = float(support_radius or _NAZAROV["support_radius"])
        dx = 2.0 * half_width / points
        dxi = 2.0 * math.pi / (points * dx)
        xi = (np.arange(points) - points // 2) * dxi
        x = (np.arange(points) - points // 2) * dx
        spectrum = self.phi_hat(xi)
        values = (dxi * points / (2.0 * math.pi)) * np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(spectrum))).real
        keep = (x >= 0.0) & (x <= self.support_radius)
        self._spline = make_interp_spline(x[keep], values[keep], k=5)

    def phi_hat(self, xi):
        return _ramp((np.abs(np.asarray(xi, dtype=float)) - self.a) / (self.b - self.a))

    def __call__(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        inside = x <= self.support_radius
        out[inside] = self._spline(x[inside])
        return out

    def serialize(self):
        return {"a": self.a, "b": self.b, "support_radius": self.support_radius}


@dataclass(frozen=True)
class DecayReport:
    certificate: Certificate
    t: np.ndarray
    D: np.ndarray

    def rows(self):
        return [{"t": float(t), "D": float(d), "abs_D": abs(float(d))} for t, d in zip(self.t, self.D)]


def _smoothed_sum(positions, masses, window, t, execution):
    lo = np.searchsorted(positions, t - window.support_radius, side="left")
    hi = np.searchsorted(positions, t + window.support_radius, side="right")
    local = positions[lo:hi]
    terms = masses[lo:hi] * window(t - local)
    order = np.argsort(np.abs(local), kind="stable")
    return execution.total(terms[order]) - 1.0


def poisson_decay_test(mu, window, t_grid, c=1.0, fit_range=None, n_target=None, noise_floor=None,
                       execution=STRICT):
    """D(t) = (mu * phi)(t) - 1 on the rescaled lattice and the log-log slope of |D|."""
    if window.b >= 2.0 * math.pi:
        raise ValidationError(f"window outer radius {window.b} must stay below 2*pi")
    fit_range = _NAZAROV["fit_range"] if fit_range is None else fit_range
    n_target = _NAZAROV["n_target"] if n_target is None else n_target
    noise_floor = _NAZAROV["noise_floor"] if noise_floor is None else noise_floor
    positions = mu.positions / c
    t = np.asarray(t_grid, dtype=float)
    reach = float(np.max(np.abs(t))) + window.support_radius
    if positions.size == 0 or positions[-1] < reach or positions[0] > -reach:
        raise ValidationError(f"lattice must cover |x| <= {reach:g}; increase K")
    D = np.array(execution.map(lambda s: _smoothed_sum(positions, mu.masses, window, s, execution), t))
    in_range = (t >= fit_range[0]) & (t <= fit_range[1])
    above = in_range & (np.abs(D) > noise_floor)
    if np.count_nonzero(above) < 3:
        slope, verdict, reason = math.nan, Verdict.HOLDS, "below noise floor"
    else:
        slope = loglog_slope(t[above], D[above])
        verdict = Verdict.HOLDS if slope <= -n_target else Verdict.FAILS
        reason = "superpolynomial-consistent" if verdict is Verdict.HOLDS else "slope above target"
    certificate = Certificate(
        statement="poisson_decay",
        anchor="(mu * phi)(t) - phi_hat(0) decays faster than any power of |t|",
        verdict=verdict,
        value=slope,
        direction=Direction.UPPER_BOUND,
        params={"window": window.serialize(), "c": c, "fit_range": list(fit_range), "n_target": n_target,
                "noise_floor": noise_floor},
        evidence={"max_abs_D": float(np.max(np.abs(D))) if D.size else 0.0,
                  "points_above_floor": int(np.count_nonzero(above)), "reason": reason},
        radius=float(np.max(np.abs(positions))),
    )
    return DecayReport(certificate, t, D)


# -- stable orthogonality ----------------------------------------------------------------------


def stable_orthogonality_certificate(X, c, R_max, A_list):
    """X(t) - t must grow without bound, then X(cZ) must pass the Krein exclusion test.

    Growth of the shift is read on both ladders, so a logarithmic shift counts.
    A rising shift whose trend is undecided leaves the certificate inconclusive.
    """
    radii = geometric_ladder(R_max)
    log_radii = log_ladder(R_max)
    shift = np.asarray(X(np.asarray(radii)), dtype=float) - np.asarray(radii)
    log_shift = np.asarray(X(np.asarray(log_radii)), dtype=float) - np.asarray(log_radii)
    rising = bool(np.all(np.diff(shift) > 0))
    shift_trend = combine(classify(shift), classify(log_shift))
    unbounded = rising and shift_trend is Trend.GROWING
    undecided = rising and shift_trend is Trend.INCONCLUSIVE
    K = int(math.ceil(float(X.inverse(R_max)[0]) / c)) + 1
    k = np.arange(-K, K + 1, dtype=float)
    exclusion = krein_exclusion(X(c * k), c, A_list, R_max)
    if unbounded and exclusion.holds:
        verdict = Verdict.HOLDS
    elif (unbounded or undecided) and exclusion.verdict is not Verdict.FAILS:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.FAILS
    return Certificate(
        statement="stable_orthogonality",
        anchor="X(t) - t -> +infinity and n(t) - 2t/c -> -infinity give stable density",
        verdict=verdict,
        params={"diffeo": X.serialize(), "c": c, "R_max": R_max, "A": list(A_list)},
        evidence={
            "shift": trend_record(radii, shift, classify(shift)),
            "shift_log_ladder": trend_record(log_radii, log_shift, classify(log_shift)),
            "shift_trend": shift_trend.value,
            "shift_unbounded": unbounded,
            "exclusion": exclusion.serialize(),
        },
        radius=R_max,
    )
