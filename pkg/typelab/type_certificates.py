"""Certificates bounding or pinning the exponential type T(mu).

Upper bounds are only issued from structural facts (the reference models);
everything numerical is a lower bound, a zero-type or an infinite-type
statement backed by windowed trends.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from typelab.certificate import Certificate, Direction, Verdict
from typelab.constants import DEFAULTS
from typelab.exceptions import GridError, ValidationError
from typelab.execution import STRICT
from typelab.measures import SampledDensity, SpectralMeasure
from typelab.products import annihilation_residual
from typelab.quadrature import integrate
from typelab.trends import Trend, classify, combine, geometric_ladder, log_ladder, trend_record

logger = logging.getLogger(__name__)

_CERTIFICATES = DEFAULTS["certificates"]
_LOG_TOP = 1e6


# -- reference models ------------------------------------------------------------------


def reference_type(model, **params):
    """Exact type of the built-in models: arithmetic_progression(ell), lebesgue, point_mass."""
    if model == "arithmetic_progression":
        ell = float(params.get("ell", 1.0))
        if ell <= 0:
            raise ValidationError("ell must be positive")
        value, anchor = math.pi / ell, "type of the sum of unit masses on ell*Z is pi/ell"
    elif model == "lebesgue":
        value, anchor = math.inf, "Lebesgue measure on the real axis has infinite type"
    elif model == "point_mass":
        value, anchor = 0.0, "finitely many atoms give a finite-dimensional L2 space"
    else:
        raise ValidationError(f"{model!r} is not a reference model")
    return Certificate(statement="reference_type", anchor=anchor, verdict=Verdict.HOLDS, value=value,
                       direction=Direction.EXACT, params={"model": model, **params})


def reference_for(mu):
    """The reference certificate that applies to mu, if any."""
    ell = mu.lattice_step()
    if ell is not None and mu.lattice_tail:
        return reference_type("arithmetic_progression", ell=ell)
    if mu.density is None and not mu.imag_heights.size and not mu.lattice_tail:
        return reference_type("point_mass")
    return None


# -- zero type -----------------------------------------------------------------------


def _log_of(K, x):
    if hasattr(K, "log"):
        return np.asarray(K.log(x), dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.log(np.asarray(K(x), dtype=float))


def _log_integral(func, top):
    """Integral over [-top, top] of func(t)/(1+t^2)."""
    def integrand(t):
        return float(func(np.asarray([t]))[0]) / (1.0 + t * t)

    return integrate(integrand, -top, top, breakpoints=(0.0,))


def zero_type_certificate(mu, K, windows=None, log_windows=None):
    """T(mu) = 0 when the integral of K against mu converges and log K/(1+t^2) is not integrable.

    K must be at least 1 with log K uniformly continuous; the modulus over unit
    shifts is measured on a grid of step 1/8.
    """
    radius = mu.truncation_radius
    if radius <= 0:
        raise ValidationError("measure has zero truncation radius")
    grid = np.arange(-radius, radius + 0.125, 0.125)
    samples = np.concatenate((grid, mu.positions))
    log_samples = _log_of(K, samples)
    if np.any(log_samples < 0) or np.any(np.isnan(log_samples)):
        bad = samples[(log_samples < 0) | np.isnan(log_samples)][0]
        raise ValidationError(f"K < 1 at x = {bad:g}")
    log_grid = log_samples[:grid.size]
    modulus = float(np.max(np.abs(log_grid[8:] - log_grid[:-8]))) if grid.size > 8 else 0.0
    windows = geometric_ladder(radius) if windows is None else [float(w) for w in windows]
    partials = [mu.integrate(K, radius=w) for w in windows]
    mass_trend = classify(partials)
    log_windows = log_ladder(_LOG_TOP) if log_windows is None else [float(w) for w in log_windows]
    log_partials = [_log_integral(lambda t: _log_of(K, t), w) for w in log_windows]
    log_trend = classify(log_partials)
    evidence = {
        "integral_of_K": trend_record(windows, partials, mass_trend),
        "log_integral_of_K": trend_record(log_windows, log_partials, log_trend),
        "log_modulus_unit": modulus,
    }
    if modulus > _CERTIFICATES["modulus_bound"]:
        verdict = Verdict.INCONCLUSIVE
        evidence["reason"] = f"log K moves by {modulus:g} over a unit shift"
    elif mass_trend is Trend.CONVERGED and log_trend is Trend.GROWING:
        verdict = Verdict.HOLDS
    elif mass_trend is Trend.GROWING or log_trend is Trend.CONVERGED:
        verdict = Verdict.FAILS
    else:
        verdict = Verdict.INCONCLUSIVE
    return Certificate(
        statement="zero_type",
        anchor="if the integral of K dmu is finite and log K/(t^2+1) is not integrable then T(mu) = 0",
        verdict=verdict, value=0.0, direction=Direction.ZERO,
        params={"K": K.serialize() if hasattr(K, "serialize") else repr(K)},
        evidence=evidence, radius=radius,
    )


# -- infinite type ------------------------------------------------------------------


def _log_density_integral(density, top):
    """Integral over [-top, top] of log(density)/(1+t^2) with Gauss rules on each sample segment."""
    grid, values = density.grid, density.values
    lo, hi = max(-top, grid[0]), min(top, grid[-1])
    inside = grid[(grid > lo) & (grid < hi)]
    edges = np.concatenate(([lo], inside, [hi]))
    if np.any(np.interp(edges, grid, values) <= 0):
        return -math.inf
    nodes, weights = roots_legendre(_CERTIFICATES["gauss_nodes"])
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = mid[:, None] + half[:, None] * nodes[None, :]
    with np.errstate(divide="ignore"):
        f = np.log(np.interp(x, grid, values)) / (1.0 + x * x)
    return math.fsum((half[:, None] * weights[None, :] * f).ravel())


def szego_infinite_type(density, windows=None):
    """T(mu) = infinity when the integral of log mu'(t)/(t^2+1) is bounded below."""
    if isinstance(density, SpectralMeasure):
        if density.density is None:
            raise ValidationError("measure has no density part")
        density = density.density
    if not isinstance(density, SampledDensity):
        raise ValidationError("szego certificate needs a sampled density")
    if not np.all(np.isfinite(density.values)):
        raise ValidationError("density must be bounded on its samples")
    reach = min(abs(density.grid[0]), abs(density.grid[-1]))
    windows = geometric_ladder(reach) if windows is None else [float(w) for w in windows]
    partials = [_log_density_integral(density, w) for w in windows]
    trend = classify(partials)
    verdict = {Trend.CONVERGED: Verdict.HOLDS, Trend.GROWING: Verdict.FAILS}.get(trend, Verdict.INCONCLUSIVE)
    evidence = trend_record(windows, partials, trend)
    if any(math.isinf(p) for p in partials):
        evidence["reason"] = "density vanishes inside a window"
    return Certificate(
        statement="infinite_type",
        anchor="if the integral of log mu'(t)/(t^2+1) is above -inf then T(mu) = inf",
        verdict=verdict, value=math.inf, direction=Direction.INFINITE,
        evidence=evidence, radius=float(windows[-1]),
    )


# -- lower bounds ---------------------------------------------------------------------


def duffin_schaeffer(mu, L, delta, x_grid):
    """T(mu) >= 2 pi / L when every window [x-L, x+L] carries mass at least delta.

    The constant is reported as stated; when mu is an arithmetic progression
    whose exact type is smaller the certificate carries a consistency flag.
    """
    if L <= 0 or delta <= 0:
        raise ValidationError("L and delta must be positive")
    x = np.sort(np.asarray(x_grid, dtype=float))
    if x.size == 0:
        raise ValidationError("empty scan grid")
    if x.size > 1 and float(np.max(np.diff(x))) > L / 4.0:
        raise GridError(f"scan spacing {float(np.max(np.diff(x))):g} exceeds L/4 = {L / 4.0:g}")
    masses = np.asarray(mu.mass(x - L, x + L), dtype=float)
    lowest = np.flatnonzero(masses == masses.min())
    at = int(lowest[np.argmin(np.abs(x[lowest]))])
    bound = 2.0 * math.pi / L
    verdict = Verdict.HOLDS if masses[at] >= delta else Verdict.FAILS
    flags = ()
    reference = reference_for(mu)
    if verdict is Verdict.HOLDS and reference is not None and bound > reference.value:
        flags = (f"bound {bound:g} exceeds the exact reference type {reference.value:g}",)
    return Certificate(
        statement="duffin_schaeffer",
        anchor="if mu[x-L, x+L] >= delta for all x then T(mu) >= 2 pi / L",
        verdict=verdict, value=bound, direction=Direction.LOWER_BOUND,
        params={"L": L, "delta": delta},
        evidence={"min_mass": float(masses[at]), "argmin": float(x[at]), "scan": [float(x[0]), float(x[-1])]},
        radius=float(np.max(np.abs(x))) + L, flags=flags,
    )


def koosis_lattice(log_omega, N_max=None):
    """T(mu) = pi for mu = sum omega(n) delta_n when both weighted sums behave.

    ``log_omega`` is vectorised over integer arrays. The first sum is judged
    on the geometric ladder, the logarithmic one on both ladders.
    """
    N_max = int(_CERTIFICATES["koosis_n_max"] if N_max is None else N_max)
    if N_max < 64:
        raise ValidationError("N_max must be at least 64")
    n = np.arange(0, N_max + 1, dtype=float)
    with np.errstate(over="ignore"):
        log_plus, log_minus = np.asarray(log_omega(n), dtype=float), np.asarray(log_omega(-n), dtype=float)
    denominator = 1.0 + n * n
    mass_terms = (np.exp(log_plus) + np.exp(log_minus)) / denominator
    log_terms = (log_plus + log_minus) / denominator
    mass_terms[0] *= 0.5
    log_terms[0] *= 0.5

    def partials(terms, windows):
        return [math.fsum(terms[:int(w) + 1]) for w in windows]

    geometric = [int(w) for w in geometric_ladder(N_max)]
    logarithmic = [int(w) for w in log_ladder(N_max)]
    mass_partials = partials(mass_terms, geometric)
    mass_trend = classify(mass_partials)
    log_geo, log_log = partials(log_terms, geometric), partials(log_terms, logarithmic)
    log_trend = combine(classify(log_geo), classify(log_log))
    if mass_trend is Trend.CONVERGED and log_trend is Trend.CONVERGED:
        verdict = Verdict.HOLDS
    elif Trend.GROWING in (mass_trend, log_trend):
        verdict = Verdict.FAILS
    else:
        verdict = Verdict.INCONCLUSIVE
    return Certificate(
        statement="koosis",
        anchor="sum of omega(n)/(1+n^2) finite and sum of log omega(n)/(1+n^2) above -inf give T(mu) = pi",
        verdict=verdict, value=math.pi, direction=Direction.EXACT, params={"N_max": N_max},
        evidence={
            "mass_sum": trend_record(geometric, mass_partials, mass_trend),
            "log_sum_geometric": trend_record(geometric, log_geo, classify(log_geo)),
            "log_sum_logarithmic": trend_record(logarithmic, log_log, classify(log_log)),
        },
        radius=float(N_max),
    )


def _contains(points, targets):
    idx = np.clip(np.searchsorted(points, targets), 0, max(points.size - 1, 0))
    near = np.minimum(np.abs(points[idx] - targets), np.abs(points[np.maximum(idx - 1, 0)] - targets))
    return near <= 1e-12 * np.maximum(1.0, np.abs(targets))


def annihilator_lower_bound(mu, H, test_family, a=None, caveat=None, execution=STRICT):
    """T(mu) >= a when 1/H' lies in L2(mu) and H annihilates every test function of type < a."""
    a = H.nominal_type if a is None else float(a)
    if not mu.is_atomic or mu.positions.size == 0:
        raise ValidationError("annihilator bound needs an atomic measure")
    if not np.all(mu.masses == 1.0):
        raise ValidationError("annihilator bound needs unit masses")
    zeros, derivs = H.signed_arrays(execution=execution)
    within = np.abs(zeros) <= mu.truncation_radius
    if not np.all(_contains(mu.positions, zeros[within])):
        missing = zeros[within][~_contains(mu.positions, zeros[within])][0]
        raise ValidationError(f"zero {missing:g} of {H.name} is not an atom of mu")
    for f in test_family:
        if not f.nominal_type < a:
            raise ValidationError(f"test function {f.name} has type {f.nominal_type:g} >= {a:g}")
    modulus = np.abs(zeros)
    windows = geometric_ladder(float(modulus.max()))
    inverse_squares = 1.0 / derivs ** 2
    partials = [execution.total(inverse_squares[modulus <= w]) for w in windows]
    l2_trend = classify(partials)
    lower_envelope = float(np.min(np.abs(derivs) / (1.0 + modulus)))
    residuals = [annihilation_residual(H, f, execution=execution) for f in test_family]
    evidence = {
        "inverse_derivative_l2": trend_record(windows, partials, l2_trend),
        "derivative_lower_envelope": lower_envelope,
        "residuals": [r.serialize() for r in residuals],
    }
    if l2_trend is not Trend.CONVERGED:
        verdict = Verdict.INCONCLUSIVE
        evidence["reason"] = "sum of 1/|H'|^2 over the zeros is not converged"
    elif all(r.annihilated for r in residuals):
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.FAILS
    return Certificate(
        statement="annihilator_lower_bound",
        anchor="1/H' on the zeros of H lies in L2(mu) and annihilates E(a), so T(mu) >= a",
        verdict=verdict, value=a, direction=Direction.LOWER_BOUND,
        params={"product": H.name, "family": [f.serialize() for f in test_family]},
        evidence=evidence, radius=float(modulus.max()), flags=(caveat,) if caveat else (),
    )


# -- coherence ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceReport:
    reference: float
    conflicts: tuple
    excused: tuple

    @property
    def coherent(self):
        return not self.conflicts

    def serialize(self):
        return {"reference": self.reference, "conflicts": list(self.conflicts), "excused": list(self.excused),
                "coherent": self.coherent}


def coherence_check(certificates, reference):
    """No issued certificate may contradict the exact reference type.

    Only a Duffin-Schaeffer bound carrying its consistency flag is excused.
    """
    exact = float(reference.value)
    conflicts, excused = [], []
    for cert in certificates:
        if not cert.holds:
            continue
        direction = cert.direction
        clash = (
            (direction is Direction.LOWER_BOUND and cert.value > exact * (1.0 + 1e-12))
            or (direction is Direction.UPPER_BOUND and cert.value < exact * (1.0 - 1e-12))
            or (direction is Direction.ZERO and exact > 0)
            or (direction is Direction.INFINITE and math.isfinite(exact))
            or (direction is Direction.EXACT and cert.statement != reference.statement and cert.value != exact)
        )
        if not clash:
            continue
        entry = {"statement": cert.statement, "value": cert.value, "direction": direction.value}
        (excused if cert.statement == "duffin_schaeffer" and cert.flags else conflicts).append(entry)
    if conflicts:
        logger.warning("%d certificates contradict the reference type %g", len(conflicts), exact)
    return CoherenceReport(exact, tuple(conflicts), tuple(excused))
