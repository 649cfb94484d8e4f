"""Forward spectral theory for -y'' + q y = lambda^2 y with y(0) = 1, y'(0) = h.

omega(lambda, x) is integrated with a fourth-order Magnus scheme that is exact
for constant potentials. On top of it sit the Weyl transform, the Parseval
check, the Phi-transform of a spectral measure and the two Gelfand-Levitan
checks.
"""
import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import sici

from typelab.certificate import Certificate, Verdict
from typelab.constants import DEFAULTS
from typelab.exceptions import ToleranceError, ValidationError
from typelab.execution import STRICT
from typelab.measures import imag_tail_test
from typelab.quadrature import composite_gauss, integrate
from typelab.trends import Trend, classify, classify_terms, geometric_ladder, trend_record

logger = logging.getLogger(__name__)

_SL = DEFAULTS["sturm_liouville"]
_GAUSS_1 = 0.5 - math.sqrt(3.0) / 6.0
_GAUSS_2 = 0.5 + math.sqrt(3.0) / 6.0
_COMMUTATOR = math.sqrt(3.0) / 12.0
_CHUNK = 2048


@dataclass(eq=False)
class SLProblem:
    """Interval [0, a) (a may be infinite), potential q and boundary slope h."""

    a: float
    q: Callable
    h: float = 0.0
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    margin: float = 0.0

    def __post_init__(self):
        self.a = float(self.a)
        if not self.a > 0:
            raise ValidationError("interval length must be positive")
        if self.margin < 0 or (math.isfinite(self.a) and self.margin >= self.a):
            raise ValidationError("margin must lie in [0, a)")
        self._lock = threading.Lock()
        self._cache = {}

    @property
    def reach(self):
        """Largest x at which q may be evaluated."""
        return self.a - self.margin

    def potential(self, x):
        return np.asarray(self.q(np.asarray(x, dtype=float)), dtype=float) * np.ones_like(x, dtype=float)

    def Q(self, x):
        """Integral of |q| over [0, x]."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return abs(self.params["value"]) * x
        cuts = tuple(g for g in self.params.get("grid", ()) if 0 < g < x)
        return integrate(lambda t: abs(float(self.potential(np.asarray([t]))[0])), 0.0, x, breakpoints=cuts)

    def serialize(self):
        a = self.a if math.isfinite(self.a) else "inf"
        return {"kind": self.kind, **self.params, "a": a, "h": self.h}


def zero_potential(a=math.inf, h=0.0):
    return SLProblem(a, np.zeros_like, h, "zero", {})


def constant_potential(value, a=math.inf, h=0.0):
    value = float(value)
    return SLProblem(a, lambda x: np.full_like(x, value), h, "constant", {"value": value})


def sampled_potential(grid, values, a=None, h=0.0):
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.size < 2 or grid.size != values.size or np.any(np.diff(grid) <= 0) or grid[0] != 0:
        raise ValidationError("sampled potential needs an increasing grid from 0 with one value per point")
    a = float(grid[-1]) if a is None else a
    return SLProblem(a, lambda x: np.interp(x, grid, values), h, "sampled",
                     {"grid": grid.tolist(), "values": values.tolist()})


def potential_from_dict(data):
    a = data.get("a", "inf")
    a = math.inf if a == "inf" else float(a)
    h = float(data.get("h", 0.0))
    kind = data["kind"]
    if kind == "zero":
        return zero_potential(a, h)
    if kind == "constant":
        return constant_potential(data["value"], a, h)
    if kind == "sampled":
        return sampled_potential(data["grid"], data["values"], None if math.isinf(a) else a, h)
    raise ValidationError(f"{kind!r} is not a potential kind")


# -- omega --------------------------------------------------------------------------------


@dataclass(frozen=True)
class OmegaSolution:
    lam: np.ndarray
    x: np.ndarray
    omega: np.ndarray
    derivative: np.ndarray
    step: float
    discrepancy: float


def _propagate(problem, lam2, x, step):
    """Magnus-4 march from 0 through the points of x; returns omega and omega' at each, shape (lam, x)."""
    y0 = np.ones(lam2.shape, dtype=complex)
    y1 = np.full(lam2.shape, problem.h, dtype=complex)
    omega = np.empty((lam2.size, x.size), dtype=complex)
    derivative = np.empty_like(omega)
    previous = 0.0
    for j, target in enumerate(x):
        width = target - previous
        count = max(1, int(math.ceil(width / step - 1e-12))) if width > 0 else 0
        if count:
            s = width / count
            starts = previous + s * np.arange(count)
            q1 = problem.potential(starts + _GAUSS_1 * s)
            q2 = problem.potential(starts + _GAUSS_2 * s)
            for c1q, c2q in zip(q1, q2):
                c1, c2 = c1q - lam2, c2q - lam2
                d = _COMMUTATOR * s * s * (c1 - c2)
                f = 0.5 * s * (c1 + c2)
                theta = np.sqrt(d * d + s * f)
                small = np.abs(theta) < 1e-8
                safe = np.where(small, 1.0, theta)
                sinhc = np.where(small, 1.0 + theta * theta / 6.0, np.sinh(safe) / safe)
                cosh = np.cosh(theta)
                y0, y1 = cosh * y0 + sinhc * (d * y0 + s * y1), cosh * y1 + sinhc * (f * y0 - d * y1)
        omega[:, j] = y0
        derivative[:, j] = y1
        previous = target
    return omega, derivative


def solve_omega(problem, lam, x_grid, step=None):
    """omega(lambda, x) and its x-derivative on an increasing grid in [0, a - margin].

    The step is halved until two successive solutions agree to the tolerance
    per unit length; the finer one is returned.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if x.size and (x[0] < 0 or np.any(np.diff(x) < 0)):
        raise ValidationError("x grid must be nondecreasing and start at or after 0")
    if x.size and x[-1] > problem.reach:
        raise ValidationError(f"x = {x[-1]:g} lies beyond a - margin = {problem.reach:g}")
    key = (lam.tobytes(), x.tobytes(), step)
    with problem._lock:  # pylint: disable=protected-access
        cached = problem._cache.get(key)  # pylint: disable=protected-access
    if cached is not None:
        return cached
    step = _SL["step"] if step is None else float(step)
    lam2 = lam * lam
    coarse, coarse_d = _propagate(problem, lam2, x, step)
    reach = max(float(x[-1]) if x.size else 0.0, 1.0)
    discrepancy = math.inf
    for _ in range(_SL["max_halvings"] + 1):
        step /= 2.0
        fine, fine_d = _propagate(problem, lam2, x, step)
        scale = max(1.0, float(np.max(np.abs(fine))) if fine.size else 1.0)
        discrepancy = float(np.max(np.abs(fine - coarse))) if fine.size else 0.0
        if discrepancy <= _SL["tolerance_per_unit"] * reach * scale:
            break
        coarse, coarse_d = fine, fine_d
    else:
        raise ToleranceError(f"step halving left a discrepancy of {discrepancy:.3g} at step {step:g}")
    solution = OmegaSolution(lam, x, fine, fine_d, step, discrepancy)
    with problem._lock:  # pylint: disable=protected-access
        problem._cache.setdefault(key, solution)  # pylint: disable=protected-access
    return solution


@dataclass(frozen=True)
class OmegaBoundReport:
    lam: complex
    x: float
    lhs: float
    rhs: float
    vacuous: bool

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def holds(self):
        return self.vacuous or self.lhs <= self.rhs + _SL["tolerance_per_unit"] * max(self.x, 1.0)

    def serialize(self):
        return {"lambda": {"re": self.lam.real, "im": self.lam.imag}, "x": self.x, "lhs": self.lhs,
                "rhs": self.rhs, "slack": self.slack, "vacuous": self.vacuous, "holds": self.holds}


def omega_bound_check(problem, lam, x):
    """|omega(lambda, x) - cos(lambda x)| against e^{x|Im lambda|}(Q(x)+|h|)/(|lambda|-Q(x))."""
    lam = complex(lam)
    x = float(x)
    solution = solve_omega(problem, lam, [x])
    lhs = float(abs(solution.omega[0, 0] - np.cos(lam * x)))
    Q = problem.Q(x)
    if abs(lam) <= Q:
        logger.warning("omega bound is vacuous: |lambda| = %g <= Q(x) = %g", abs(lam), Q)
        return OmegaBoundReport(lam, x, lhs, math.inf, True)
    rhs = math.exp(x * abs(lam.imag)) * (Q + abs(problem.h)) / (abs(lam) - Q)
    return OmegaBoundReport(lam, x, lhs, rhs, False)


# -- Weyl transform -----------------------------------------------------------------------


def _x_rule(f, problem):
    """Gauss nodes and weights over the support of f inside [0, a - margin]."""
    if f.name == "zero":
        return np.zeros(0), np.zeros(0)
    if f.support is None:
        raise ValidationError(f"{f.name} declares no compact support")
    lo, hi = f.support
    if lo < 0 or hi > problem.reach:
        raise ValidationError(f"support [{lo:g}, {hi:g}] leaves [0, a - margin] = [0, {problem.reach:g}]")
    return composite_gauss(lo, hi, _SL["x_panel_width"], _SL["x_panel_nodes"])


def weyl_transform(f, problem, lam_grid, execution=STRICT):
    """Wf(lambda) = integral over [0, a) of f(x) omega(lambda, x), sampled on lam_grid."""
    lam = np.atleast_1d(np.asarray(lam_grid, dtype=complex))
    nodes, weights = _x_rule(f, problem)
    if nodes.size == 0:
        values = np.zeros(lam.size, dtype=complex)
    else:
        fw = weights * np.asarray(f(nodes), dtype=float)

        def chunk(part):
            return solve_omega(problem, part, nodes).omega @ fw

        values = execution.map_chunks(chunk, lam, _CHUNK)
    if np.all(lam.imag == 0):
        return values.real
    return values


@dataclass(frozen=True)
class ParsevalReport:
    norm_f: float
    norm_transform: float
    relative_error: float
    tail_bound: float
    evidence: dict

    def serialize(self):
        return {"norm_f": self.norm_f, "norm_transform": self.norm_transform,
                "relative_error": self.relative_error, "tail_bound": self.tail_bound, **self.evidence}


def _lambda_rule(density, radius):
    lo, hi = max(density.window[0], -radius), min(density.window[1], radius)
    if not hi > lo:
        return np.zeros(0), np.zeros(0)
    nodes, weights = composite_gauss(lo, hi, _SL["lambda_piece_width"], _SL["lambda_piece_nodes"])
    return nodes, weights * density(nodes)


def parseval_check(f, problem, mu, tolerance=None, execution=STRICT):
    """Relative gap between the L2(0, a) norm of f and the L2(mu) norm of its Weyl transform."""
    tolerance = _SL["parseval_tolerance"] if tolerance is None else tolerance
    nodes, weights = _x_rule(f, problem)
    norm_f = math.fsum(weights * np.asarray(f(nodes), dtype=float) ** 2) if nodes.size else 0.0
    radius = mu.truncation_radius
    inside = np.abs(mu.positions) <= radius
    points = [mu.positions[inside]]
    masses = [mu.masses[inside]]
    if mu.density is not None:
        lam_nodes, lam_weights = _lambda_rule(mu.density, radius)
        points.append(lam_nodes)
        masses.append(lam_weights)
    points, masses = np.concatenate(points), np.concatenate(masses)
    transform = weyl_transform(f, problem, points, execution)
    terms = masses * np.abs(transform) ** 2
    windows = geometric_ladder(radius) if radius > 0 else [0.0] * 4
    partials = [execution.total(terms[np.abs(points) <= w]) for w in windows]
    trend = classify(partials)
    norm_transform = execution.total(terms)
    if trend is Trend.CONVERGED:
        tail_bound = abs(partials[-1] - partials[-2])
    else:
        tail_bound = math.inf
    scale = norm_f if norm_f > 0 else 1.0
    if tail_bound > tolerance * scale:
        raise ToleranceError(f"transform tail bound {tail_bound:.3g} exceeds tolerance {tolerance:g}")
    relative = abs(norm_f - norm_transform) / norm_f if norm_f > 0 else abs(norm_transform)
    logger.info("parseval for %s: relative error %.3g", f.name, relative)
    return ParsevalReport(norm_f, norm_transform, relative, tail_bound, trend_record(windows, partials, trend))


# -- Phi-transform --------------------------------------------------------------------------


@dataclass(frozen=True)
class PhiFunction:
    x: np.ndarray
    values: np.ndarray
    source: dict = field(default_factory=dict)

    def rows(self):
        return [{"x": float(x), "phi": float(v)} for x, v in zip(self.x, self.values)]


def _one_minus_cos_over_square(lam, x):
    """(1 - cos(lam x))/lam^2 with the value x^2/2 at lam = 0."""
    lam = np.asarray(lam, dtype=float)
    safe = np.where(lam == 0, 1.0, lam)
    return np.where(lam == 0, 0.5 * x * x, 2.0 * np.sin(0.5 * safe * x) ** 2 / (safe * safe))


def _antiderivative(lam, x):
    """Integral of (1 - cos(t x))/t^2 from 0 to lam."""
    lam = np.asarray(lam, dtype=float)
    safe = np.where(lam == 0, 1.0, lam)
    si, _ = sici(lam * x)
    return np.where(lam == 0, 0.0, -2.0 * np.sin(0.5 * safe * x) ** 2 / safe + x * si)


def _cin(z):
    """Integral of (1 - cos t)/t from 0 to z >= 0."""
    z = np.asarray(z, dtype=float)
    small = z < 1e-3
    safe = np.where(small, 1.0, z)
    _, ci = sici(safe)
    return np.where(small, z * z / 4.0 - z ** 4 / 96.0, np.euler_gamma + np.log(safe) - ci)


def _density_phi(density, x):
    grid, values = density.grid, density.values
    if x == 0:
        return 0.0
    left, right = grid[:-1], grid[1:]
    slope = np.diff(values) / np.diff(grid)
    offset = values[:-1] - slope * left
    first = _antiderivative(right, x) - _antiderivative(left, x)
    second = _cin(np.abs(right) * x) - _cin(np.abs(left) * x)
    total = math.fsum(offset * first + slope * second)
    if density.tail == "constant":
        limit = 0.5 * math.pi * x
        total += values[-1] * (limit - float(_antiderivative(grid[-1], x)))
        total += values[0] * (float(_antiderivative(grid[0], x)) + limit)
    return total


def _lattice_phi(step, mass, x):
    """Phi of the whole lattice step*Z with equal masses, in closed form with t = step*x mod 2 pi."""
    theta = math.fmod(step * x, 2.0 * math.pi)
    return mass * (0.5 * x * x + 2.0 / step ** 2 * (0.5 * math.pi * theta - 0.25 * theta * theta))


def _is_full_lattice(mu, step):
    return (step is not None and mu.lattice_tail and mu.symmetric and np.any(mu.positions == 0.0)
            and np.all(mu.masses == mu.masses[0]))


def phi_transform(mu, x_grid, execution=STRICT):
    """Phi(x) = integral of (1 - cos(lambda x))/lambda^2 over the real and imaginary parts of mu."""
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if np.any(x < 0):
        raise ValidationError("Phi is evaluated on x >= 0")
    if mu.imag_heights.size and x.size:
        check = imag_tail_test(mu, 0.0, mode="exponential", x=float(x.max()), execution=execution)
        if check.verdict is Verdict.FAILS:
            raise ValidationError(f"imaginary atoms are not integrable against cosh at x = {x.max():g}")
    step = mu.lattice_step()
    full_lattice = _is_full_lattice(mu, step)
    values = np.empty(x.size)
    for i, point in enumerate(x):
        if full_lattice:
            real = _lattice_phi(step, float(mu.masses[0]), point)
        else:
            real = execution.total(mu.masses * _one_minus_cos_over_square(mu.positions, point))
        if mu.density is not None:
            real += _density_phi(mu.density, point)
        imaginary = execution.total(
            4.0 * mu.imag_masses * np.sinh(0.5 * mu.imag_heights * point) ** 2 / mu.imag_heights ** 2
        ) if mu.imag_heights.size else 0.0
        values[i] = real + imaginary
    return PhiFunction(x, values, {"lattice_closed_form": bool(full_lattice)})


# -- Gelfand-Levitan checks ----------------------------------------------------------------


def _fit_derivatives(x, y):
    poly = np.polynomial.Polynomial.fit(x, y, 4).convert()
    coef = np.concatenate((poly.coef, np.zeros(5)))
    return float(coef[1]), 2.0 * float(coef[2])


def _third_difference(x, y, spacing):
    idx = np.arange(0, x.size - 3 * spacing)
    d3 = y[idx + 3 * spacing] - 3 * y[idx + 2 * spacing] + 3 * y[idx + spacing] - y[idx]
    return d3 / (x[spacing] - x[0]) ** 3


def gl_check(phi, h=None, a=None):
    """Phi'(+0) = 1 and Phi''(+0) = -h from one-sided degree-4 fits, plus a C3 stability proxy."""
    x, y = np.asarray(phi.x, dtype=float), np.asarray(phi.values, dtype=float)
    if np.count_nonzero((x >= 0) & (x <= 1e-2)) < 5:
        raise ValidationError("Phi needs at least five samples in [0, 1e-2]")
    if a is not None:
        keep = x < 2.0 * a
        x, y = x[keep], y[keep]
    first_fine, second_fine = _fit_derivatives(x[:5], y[:5])
    if x.size >= 9:
        first_coarse, second_coarse = _fit_derivatives(x[:9:2], y[:9:2])
    else:
        first_coarse, second_coarse = first_fine, second_fine
    first_gap = abs(first_fine - first_coarse)
    second_gap = abs(second_fine - second_coarse)
    first_tol, second_tol = _SL["first_derivative_tolerance"], _SL["second_derivative_tolerance"]
    evidence = {
        "phi_prime_0": first_fine, "phi_second_0": second_fine,
        "richardson_gaps": [first_gap, second_gap], "phi_at_0": float(y[0]) if x[0] == 0 else None,
    }
    gaps = np.diff(x)
    if gaps.size >= 6 and np.allclose(gaps, gaps[0], rtol=1e-9, atol=0.0):
        fine, coarse = _third_difference(x, y, 1), _third_difference(x, y, 2)
        proxy = {"max_fine": float(np.max(np.abs(fine))), "max_coarse": float(np.max(np.abs(coarse)))}
        proxy["stable"] = abs(proxy["max_fine"] - proxy["max_coarse"]) <= 0.1 * max(1.0, proxy["max_coarse"])
    else:
        proxy = {"stable": None, "reason": "non-uniform grid"}
    evidence["c3_proxy"] = proxy
    inferred_h = -second_fine
    evidence["inferred_h"] = inferred_h
    if first_gap > first_tol or second_gap > second_tol:
        verdict = Verdict.INCONCLUSIVE
        evidence["reason"] = "derivative extrapolation is unstable"
    elif abs(first_fine - 1.0) > first_tol:
        verdict = Verdict.FAILS
    elif h is not None and abs(second_fine + h) > second_tol:
        verdict = Verdict.FAILS
    elif proxy["stable"] is False:
        verdict = Verdict.FAILS
    elif proxy["stable"] is None:
        verdict = Verdict.INCONCLUSIVE
        evidence["reason"] = "C3 proxy needs a uniform grid"
    else:
        verdict = Verdict.HOLDS
    return Certificate(
        statement="gelfand_levitan",
        anchor="Phi is C3 on [0, 2a) with Phi'(+0) = 1 and Phi''(+0) = -h",
        verdict=verdict, value=inferred_h, params={"h": h, "a": a}, evidence=evidence,
        radius=float(x[-1]),
    )


@dataclass(frozen=True)
class PairingReport:
    lhs: float
    rhs: float
    f_at_0: float
    by_sigma: tuple
    tolerance: float

    @property
    def discrepancy(self):
        return abs(self.lhs - self.rhs)

    @property
    def passes(self):
        return self.discrepancy <= self.tolerance

    def serialize(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "f_at_0": self.f_at_0, "discrepancy": self.discrepancy,
                "by_sigma": list(self.by_sigma), "passes": self.passes}


def _heat_kernel(x, sigma):
    return np.exp(-x * x / (4.0 * sigma)) / (2.0 * math.sqrt(math.pi * sigma))


def pairing_test(mu, f, a=None, sigmas=None, tolerance=None):
    """Compare the integral of f-hat against mu with 2 f(0) + integral of f M, M regularised in sigma.

    M_sigma(x) = sum over mu of e^{-i lambda x - sigma lambda^2} minus 2 k_sigma(x);
    the integral of f M_sigma is extrapolated linearly to sigma = 0.
    """
    sigmas = tuple(_SL["sigmas"] if sigmas is None else sigmas)
    tolerance = _SL["pairing_tolerance"] if tolerance is None else tolerance
    f_at_0 = float(np.asarray(f(np.zeros(1)))[0])
    if f.name == "zero":
        return PairingReport(0.0, 0.0, 0.0, tuple({"sigma": s, "integral_fM": 0.0} for s in sigmas), tolerance)
    if f.support is None:
        raise ValidationError(f"{f.name} declares no compact support")
    lo, hi = f.support
    if a is not None and not (-2.0 * a < lo and hi < 2.0 * a):
        raise ValidationError(f"support [{lo:g}, {hi:g}] leaves (-2a, 2a)")
    x, wx = composite_gauss(lo, hi, _SL["x_panel_width"], _SL["x_panel_nodes"])
    fx = np.asarray(f(x), dtype=float)
    radius = mu.truncation_radius
    inside = np.abs(mu.positions) <= radius
    lam = [mu.positions[inside]]
    mass = [mu.masses[inside]]
    if mu.density is not None:
        nodes, weights = _lambda_rule(mu.density, radius)
        lam.append(nodes)
        mass.append(weights)
    lam, mass = np.concatenate(lam), np.concatenate(mass)
    f_hat = np.empty(lam.size, dtype=complex)
    transforms = np.zeros((len(sigmas), x.size))
    for start in range(0, lam.size, 512):
        part = slice(start, start + 512)
        phases = np.exp(-1j * np.outer(lam[part], x))
        f_hat[part] = phases @ (wx * fx)
        for k, sigma in enumerate(sigmas):
            transforms[k] += ((mass[part] * np.exp(-sigma * lam[part] ** 2)) @ phases).real
    if lam.size:
        edge = np.abs(lam) >= 0.9 * np.max(np.abs(lam))
        if np.max(np.abs(f_hat[edge])) > 1e-6 * max(np.max(np.abs(f_hat)), 1e-300):
            raise ValidationError("f-hat has not decayed at the edge of the truncation window")
    lhs = float(math.fsum((mass * f_hat).real))
    rows, integrals = [], []
    for sigma, transform in zip(sigmas, transforms):
        M = transform - 2.0 * _heat_kernel(x, sigma)
        value = math.fsum(wx * fx * M)
        integrals.append(value)
        rows.append({"sigma": sigma, "integral_fM": value, "discrepancy": abs(lhs - 2.0 * f_at_0 - value)})
    # integrals that already shrink geometrically as sigma decreases are read off at the smallest sigma
    ordered = [integrals[i] for i in np.argsort(sigmas)[::-1]]
    if len(sigmas) < 2 or classify_terms(ordered) is Trend.CONVERGED:
        limit = ordered[-1]
    else:
        _, limit = np.polyfit(np.asarray(sigmas), np.asarray(integrals), 1)
    rhs = 2.0 * f_at_0 + float(limit)
    report = PairingReport(lhs, rhs, f_at_0, tuple(rows), tolerance)
    logger.info("pairing test for %s: discrepancy %.3g", f.name, report.discrepancy)
    return report
