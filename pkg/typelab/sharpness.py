"""Counterexample constructions showing the exponential-proximity conditions are sharp.

Radii in these constructions grow like towers of exponentials, so every
quantity is handled in log-radius coordinates t = log|x| and every step
integral relative to the start of its step.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from typelab.constants import DEFAULTS
from typelab.exceptions import ConstructionError, ValidationError
from typelab.functions import sinc_power
from typelab.nodes import build_lq7
from typelab.products import DerivativeEnvelope, annihilation_residual
from typelab.quadrature import integrate
from typelab.trends import Trend, classify, combine, geometric_ladder, log_ladder, trend_record

logger = logging.getLogger(__name__)

_SHARPNESS = DEFAULTS["sharpness"]
_CHECK_TOLERANCE = 1e-9


class EpsilonRate:
    """Nonincreasing positive rate eps(r) -> 0 with a log-radius evaluator t -> eps(e^t)."""

    def __init__(self, evaluator, log_evaluator=None, name="custom", params=None):
        self._evaluator = evaluator
        self._log_evaluator = log_evaluator
        self.name = name
        self.params = dict(params or {})

    def __call__(self, r):
        return self._evaluator(r)

    def at_log(self, t):
        if self._log_evaluator is not None:
            return self._log_evaluator(t)
        return self._evaluator(math.exp(t))

    def sup_from_log(self, a):
        """sup over t >= a of eps(e^t), which is eps(e^a) for a nonincreasing rate."""
        return self.at_log(a)

    def check_monotone(self, log_grid):
        values = [self.at_log(t) for t in log_grid]
        return all(b <= a for a, b in zip(values, values[1:])) and all(v > 0 for v in values)

    def serialize(self):
        return {"rate": self.name, **self.params}


def inverse_log():
    """eps(r) = 1/log(e + r)."""
    return EpsilonRate(lambda r: 1.0 / math.log(math.e + r),
                       lambda t: 1.0 / (t + math.log1p(math.exp(1.0 - t))) if t > -700 else 1.0,
                       name="inverse_log")


RATES = {"inverse_log": inverse_log}


# -- even weights in log-radius coordinates -------------------------------------------


class EvenWeight:
    """Even weight given by ell(t) = log(1/w(e^t)) through the stable product ell(t) e^{-t}."""

    def __init__(self, name, scaled, near=None, breakpoints=()):
        self.name = name
        self._scaled = scaled
        self._near = near
        self.breakpoints = tuple(breakpoints)

    def scaled(self, t):
        """ell(t) * e^{-t} for t >= 0."""
        return self._scaled(t)

    def near(self, x):
        """log(1/w(x)) for |x| <= 1."""
        if self._near is not None:
            return self._near(x)
        return self._scaled(0.0)

    @classmethod
    def from_callable(cls, w, name="weight"):
        def scaled(t):
            value = float(w(math.exp(t)))
            if not value > 0:
                raise ValidationError(f"weight is not positive at |x| = e^{t:g}")
            return -math.log(value) * math.exp(-t)

        def near(x):
            value = float(w(x))
            if not value > 0:
                raise ValidationError(f"weight is not positive at x = {x:g}")
            return -math.log(value)

        return cls(name, scaled, near)


def unit_weight():
    return EvenWeight("unit", lambda t: 0.0, lambda x: 0.0)


def exponential_weight():
    """w(x) = e^{-|x|}."""
    return EvenWeight("exp_abs", lambda t: 1.0, lambda x: abs(x))


@dataclass(frozen=True)
class LogIntegralReport:
    weight: str
    windows: tuple
    partials: tuple
    trend: Trend
    ladders: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.trend is Trend.CONVERGED

    def serialize(self):
        return {"weight": self.weight, **trend_record(self.windows, self.partials, self.trend), "ladders": self.ladders}


def _log_partials(weight, log_windows):
    near = 2.0 * integrate(lambda x: weight.near(x) / (1.0 + x * x), 0.0, 1.0)
    cuts = sorted(b for b in weight.breakpoints if b > 0)

    def integrand(t):
        return weight.scaled(t) * 2.0 / (1.0 + math.exp(-2.0 * t))

    partials, running, previous = [], near, 0.0
    for top in log_windows:
        if top < previous:
            raise ValidationError("windows must be increasing")
        inner = tuple(b for b in cuts if previous < b < top)
        running += integrate(integrand, previous, top, breakpoints=inner)
        partials.append(running)
        previous = top
    return partials


def log_integral_report(weight, windows=None, log_windows=None, min_increment=None):
    """Trend of the partial integrals of log(1/w(x))/(1+x^2) over |x| <= R.

    Without windows both the geometric and the logarithmic ladder below
    R = 10^6 are evaluated and combined. ``min_increment`` declares
    divergence when every window adds at least that much.
    """
    ladders = {}
    if windows is None and log_windows is None:
        top = 1e6
        geometric = [math.log(r) for r in geometric_ladder(top)]
        logarithmic = [math.log(r) for r in log_ladder(top)]
        geo_partials = _log_partials(weight, geometric)
        log_partials = _log_partials(weight, logarithmic)
        ladders = {
            "geometric": trend_record(np.exp(geometric), geo_partials, classify(geo_partials)),
            "logarithmic": trend_record(np.exp(logarithmic), log_partials, classify(log_partials)),
        }
        trend = combine(classify(geo_partials), classify(log_partials))
        log_windows, partials = geometric, geo_partials
    else:
        if log_windows is None:
            if any(w <= 1.0 for w in windows):
                raise ValidationError("windows must exceed 1")
            log_windows = [math.log(w) for w in windows]
        partials = _log_partials(weight, log_windows)
        trend = classify(partials)
    increments = np.diff(partials)
    if min_increment is not None and increments.size and np.all(increments >= min_increment):
        trend = Trend.GROWING
    logger.info("log integral of %s: %s", weight.name, trend.value)
    return LogIntegralReport(weight.name, tuple(float(t) for t in log_windows), tuple(partials), trend, ladders)


# -- the piecewise convex f and the weights phi, psi ---------------------------------


@dataclass(frozen=True)
class Step:
    n: int
    a: float
    b: float
    gamma: float
    j: int

    @property
    def length(self):
        return self.b - self.a

    @property
    def kappa(self):
        L = self.length
        return math.expm1(L) / L

    @property
    def start(self):
        """Where l_n crosses zero."""
        return self.a - 1.0 / self.kappa

    def scaled(self, t):
        """f_n(t) e^{-t}."""
        value = 1.0 + self.kappa * (t - self.a)
        return self.gamma * math.exp(self.a - t) * value if value > 0 else 0.0

    def integrals(self):
        """Closed forms of the integral of f_n e^{-x} to the left of a, over [a, b] and right of b."""
        L, kappa, gamma = self.length, self.kappa, self.gamma
        s0 = max(-self.a, -1.0 / kappa)
        left = gamma * (-1.0 - kappa + (1.0 + kappa + kappa * s0) * math.exp(-s0))
        middle = gamma * (-math.expm1(-L) + kappa * (1.0 - (1.0 + L) * math.exp(-L)))
        right = gamma * (1.0 + -math.expm1(-L) / L)
        return left, middle, right

    def quadrature(self):
        """The same three integrals by quadrature in coordinates relative to a."""
        kappa, L, gamma = self.kappa, self.length, self.gamma

        def integrand(s):
            return gamma * max(1.0 + kappa * s, 0.0) * math.exp(-s)

        s0 = max(-self.a, -1.0 / kappa)
        return (integrate(integrand, s0, 0.0), integrate(integrand, 0.0, L),
                integrate(integrand, L, L + 80.0))

    def checks(self):
        left, middle, right = self.integrals()
        q_left, q_middle, q_right = self.quadrature()
        L = self.length
        return {
            "gamma_bound": self.gamma < 4.0 ** -self.n,
            "width_bound": L * self.gamma < 2.0 ** -self.n,
            "slope_bound": self.kappa * self.gamma >= 10.0,
            "b_beyond_a_plus_1": L >= 1.0,
            "middle_at_least_one": middle >= 1.0 and q_middle >= 1.0 - _CHECK_TOLERANCE,
            "left_at_most": left <= (math.e - 1.0) * self.gamma + _CHECK_TOLERANCE,
            "right_at_most": right <= 2.0 * self.gamma + _CHECK_TOLERANCE,
            "middle_mass_bound": self.gamma * L < 2.0 ** -self.n,
            "quadrature_agrees": all(abs(q - c) <= _CHECK_TOLERANCE * max(1.0, abs(c))
                                     for q, c in ((q_left, left), (q_middle, middle), (q_right, right))),
        }

    def serialize(self):
        left, middle, right = self.integrals()
        return {"n": self.n, "a": self.a, "b": self.b, "gamma": self.gamma, "j": self.j, "kappa": self.kappa,
                "left": left, "middle": middle, "right": right, "checks": self.checks()}


class PiecewiseConvexF:
    """f = sum of max(l_n, 0) with l_n through (a_n, gamma_n e^{a_n}) and (b_n, gamma_n e^{b_n})."""

    def __init__(self, steps):
        self.steps = tuple(steps)
        log_slopes = [math.log(s.gamma) + s.a + math.log(s.kappa) for s in self.steps]
        if any(b <= a for a, b in zip(log_slopes, log_slopes[1:])):
            raise ConstructionError("step slopes must increase for f to be convex")

    def scaled(self, t):
        return math.fsum(step.scaled(t) for step in self.steps)

    def breakpoints(self):
        points = []
        for step in self.steps:
            points.extend((max(step.start, 0.0), step.a, step.b))
        return points


def _feasible_j(gamma, n):
    """Smallest j with kappa gamma >= 10 at L = 1 + j/8, provided L gamma < 2^{-n} then holds; else None."""
    def kappa_gamma(j):
        L = 1.0 + j / 8.0
        return math.expm1(L) / L * gamma

    if kappa_gamma(0) >= 10.0:
        j = 0
    else:
        lo, hi = 0, 1
        while kappa_gamma(hi) < 10.0:
            lo, hi = hi, hi * 2
            if hi > _SHARPNESS["j_cap"]:
                return None
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if kappa_gamma(mid) >= 10.0:
                hi = mid
            else:
                lo = mid
        j = hi
    return j if (1.0 + j / 8.0) * gamma < 2.0 ** -n else None


def _step_at(epsilon, a, n):
    gamma = epsilon.sup_from_log(a)
    if not gamma < 4.0 ** -n:
        return None
    j = _feasible_j(gamma, n)
    if j is None:
        return None
    return Step(n, float(a), a + 1.0 + j / 8.0, gamma, j)


def _next_step(epsilon, start, n):
    """First integer a >= start admitting a feasible step; feasibility is monotone in a."""
    step = _step_at(epsilon, start, n)
    if step is not None:
        return step
    lo, width = start, 1
    while True:
        hi = start + width
        if hi > _SHARPNESS["a_cap"]:
            raise ConstructionError(f"step {n}: no feasible (a, b) with a below {_SHARPNESS['a_cap']:g}")
        if _step_at(epsilon, hi, n) is not None:
            break
        lo, width = hi, width * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _step_at(epsilon, mid, n) is not None:
            hi = mid
        else:
            lo = mid
    return _step_at(epsilon, hi, n)


@dataclass(frozen=True)
class Thm15iResult:
    f: PiecewiseConvexF
    phi: EvenWeight
    psi: EvenWeight
    ledger: tuple

    @property
    def steps(self):
        return self.f.steps

    @property
    def all_checks_pass(self):
        return all(all(step.checks().values()) for step in self.steps) and all(
            row["divergence_ok"] for row in self.ledger)

    def serialize(self):
        return {"steps": [s.serialize() for s in self.steps], "ledger": list(self.ledger),
                "all_checks_pass": self.all_checks_pass}


def _psi_scaled(f, epsilon):
    def scaled(t):
        F = f.scaled(t)
        E = epsilon.at_log(t)
        lower = min(F, E)
        gap = abs(F - E)
        if t > 700.0:
            return lower
        return lower - math.exp(-t) * math.log1p(math.exp(-gap * math.exp(t)))

    return scaled


def build_thm15i(epsilon, n_max):
    """Inductive steps (a_n, b_n, gamma_n), the weights phi and psi and the per-step ledger."""
    steps, start = [], 0
    for n in range(1, int(n_max) + 1):
        step = _next_step(epsilon, start, n)
        steps.append(step)
        start = int(math.ceil(step.b))
        logger.info("step %d: a=%g b=%g gamma=%.3g", n, step.a, step.b, step.gamma)
    f = PiecewiseConvexF(steps)
    ledger, divergence, convergence, side = [], 0.0, 0.0, 0.0
    for step in steps:
        left, middle, right = step.integrals()
        divergence += middle
        side += (math.e - 1.0 + 2.0) * step.gamma
        increment = (math.e - 1.0) * step.gamma + step.gamma * step.length + 2.0 * step.gamma
        convergence += increment
        ledger.append({
            "n": step.n,
            "divergence_partial": divergence,
            "divergence_bound": step.n - side,
            "divergence_ok": divergence >= step.n - side and divergence >= step.n - 1.0 / 3.0,
            "convergence_partial": convergence,
            "convergence_increment": increment,
            "convergence_ok": increment <= (math.e + 1.0) * 4.0 ** -step.n + 2.0 ** -step.n,
        })
    breakpoints = f.breakpoints()
    phi = EvenWeight("phi", f.scaled, lambda x: f.scaled(0.0), breakpoints)
    at_origin = f.scaled(0.0)
    psi = EvenWeight("psi", _psi_scaled(f, epsilon),
                     lambda x: -math.log(math.exp(-at_origin) + math.exp(-epsilon(abs(x)) * abs(x))), breakpoints)
    return Thm15iResult(f, phi, psi, tuple(ledger))


def step_windows(result):
    """Log-radius windows at the step ends of a construction."""
    return [step.b for step in result.steps]


# -- separated intervals [y_k, 2 y_k] ----------------------------------------------------


@dataclass(frozen=True)
class LQ1Result:
    log_y: tuple
    gammas: tuple
    checks: tuple
    sum_trend: Trend

    def intervals(self):
        """I_k = [y_k, 2 y_k] in log-radius coordinates."""
        return [(u, u + math.log(2.0)) for u in self.log_y]

    def scaled_phi(self, t):
        """phi(t) e^{-t} with phi = sum of gamma_k y_k (t + 1 - log y_k)_+."""
        return math.fsum(g * (t + 1.0 - u) * math.exp(u - t)
                         for g, u in zip(self.gammas, self.log_y) if t + 1.0 - u > 0)

    def serialize(self):
        return {"log_y": list(self.log_y), "gammas": list(self.gammas), "checks": list(self.checks),
                "sum_trend": self.sum_trend.value}


def _next_log_y(epsilon, u, k):
    step = math.log(4.0)

    def ok(j):
        return k * epsilon.at_log(u + j * step) <= 2.0 ** -k

    lo, hi = 0, 1
    while not ok(hi):
        lo, hi = hi, hi * 2
        if u + hi * step > _SHARPNESS["log_y_cap"]:
            raise ConstructionError(f"sum of gamma_k is not Cauchy within log y <= {_SHARPNESS['log_y_cap']:g}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return u + hi * step


def build_lq1(epsilon, k_max, y1=10.0):
    """Intervals [y_k, 2y_k] with y_{k+1} >= 4 y_k and gamma_k = k eps(y_k) <= 2^{-k} for k >= 2."""
    log_y = [math.log(y1)]
    for k in range(2, int(k_max) + 1):
        log_y.append(_next_log_y(epsilon, log_y[-1], k))
    gammas = [k * epsilon.at_log(u) for k, u in enumerate(log_y, start=1)]
    bound = 2.0 / (1.0 + math.log(2.0))
    checks = []
    result = LQ1Result(tuple(log_y), tuple(gammas), (), Trend.INCONCLUSIVE)
    for k, (u, gamma) in enumerate(zip(log_y, gammas), start=1):
        quadrature = integrate(lambda t, g=gamma, u=u: g * (t + 1.0 - u) * math.exp(u - t), u - 1.0, u + 60.0)
        samples = [u + math.log(v) for v in np.linspace(1.0, 2.0, 9)]
        ratios = [epsilon.at_log(x) / result.scaled_phi(x) for x in samples]
        at_mid = epsilon.at_log(u + math.log(1.5)) / result.scaled_phi(u + math.log(1.5))
        checks.append({
            "k": k,
            "log_y": u,
            "gamma": gamma,
            "integral": quadrature,
            "integral_ok": abs(quadrature - math.e * gamma) <= _CHECK_TOLERANCE * max(1.0, math.e * gamma),
            "max_ratio": max(ratios),
            "ratio_at_1.5y": at_mid,
            "ratio_ok": max(ratios) <= bound / k,
            "disjoint": k == 1 or u - log_y[k - 2] >= math.log(4.0),
        })
    partials = np.cumsum(gammas).tolist()
    trend = classify(partials) if len(partials) >= 4 else Trend.INCONCLUSIVE
    return LQ1Result(tuple(log_y), tuple(gammas), tuple(checks), trend)


# -- node sets with paired gaps ------------------------------------------------------------


@dataclass(frozen=True)
class Thm15iiResult:
    lq7: object
    A: frozenset
    B: frozenset
    Lambda: np.ndarray
    Lambda_star: np.ndarray
    pairs: tuple
    annihilation: tuple

    def serialize(self):
        return {
            "A": sorted(self.A),
            "B": sorted(self.B),
            "Lambda_size": int(self.Lambda.size),
            "Lambda_star_size": int(self.Lambda_star.size),
            "pairs": list(self.pairs),
            "annihilation": list(self.annihilation),
            "lq7": self.lq7.serialize(),
            "omitted": "the zero set of the nonconstructive F is not part of Lambda",
        }


def classify_indices(lq1, K_max):
    """k in B when (2k+1, 2k+2) lies inside one of the intervals I_n."""
    B = set()
    for u in lq1.log_y:
        if u > 700.0:
            break
        y = math.exp(u)
        for k in range(K_max + 1):
            if y <= 2 * k + 1 and 2 * k + 2 <= 2.0 * y:
                B.add(k)
    return frozenset(range(K_max + 1)) - B, frozenset(B)


def build_thm15ii(epsilon, K_max, lq1, test_bs=(1.0, 1.5), counter_b=3.0, tolerance=1e-5, padding=None):
    """Nodes with the A/B gap rule, Lambda and Lambda*, the pairing bound and annihilation by G."""
    A, B = classify_indices(lq1, K_max)
    if not B:
        raise ConstructionError(f"no index k <= {K_max} falls inside the intervals; increase K_max")

    def eta_rule(k):
        if k in B:
            return Fraction(math.exp(-epsilon(2 * k + 2) * (2 * k + 2)))
        return Fraction(1, 10)

    periods = padding if padding is not None else max(2 * K_max, 200)
    lq7 = build_lq7(eta_rule, K_max, B=B, padding=periods)
    nodes = lq7.nodes
    G = lq7.product
    sigma = np.sort(np.concatenate([[float(v[k]) for v in (nodes.a, nodes.b, nodes.c, nodes.d)]
                                    for k in range(K_max + 1)]))
    Lambda = np.concatenate((-sigma[::-1], [0.0], sigma))
    dropped = {float(v[k]) for k in B for v in (nodes.b, nodes.d)}
    keep = np.array([abs(x) not in dropped for x in Lambda])
    Lambda_star = Lambda[keep]
    pairs = []
    for k in sorted(B):
        for x, y in ((nodes.a[k], nodes.b[k]), (nodes.c[k], nodes.d[k])):
            xf = float(x)
            allowed = math.exp(-epsilon(xf) * xf)
            pairs.append({"k": k, "x": xf, "y": float(y), "gap": float(y - x), "allowed": allowed,
                          "passes": float(y - x) <= allowed,
                          "rho_monotone": xf * epsilon(xf) <= (2 * k + 2) * epsilon(2 * k + 2)})
    tail = np.abs(G.derivatives(G.count))[-4:]
    G.envelope = DerivativeEnvelope(float(tail.min()), 0.0)
    annihilation = []
    for b in tuple(test_bs) + (counter_b,):
        f = sinc_power(b, 4)
        report = annihilation_residual(G, f, tolerance=tolerance)
        annihilation.append({**report.serialize(), "type": f.nominal_type,
                             "expected": "annihilated" if f.nominal_type < G.nominal_type else "not annihilated"})
    logger.info("thm15ii: |A|=%d |B|=%d |Lambda|=%d", len(A), len(B), Lambda.size)
    return Thm15iiResult(lq7, A, B, Lambda, Lambda_star, tuple(pairs), tuple(annihilation))
