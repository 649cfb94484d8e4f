"""Truncated measures on the real line plus symmetric atoms on the imaginary axis.

The operations here are the growth, majorization, proximity and tail
predicates. Every measure carries an explicit truncation radius and every
verdict is a statement about the windows that were actually evaluated.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from typelab.certificate import Certificate, Direction, Verdict
from typelab.constants import DEFAULTS
from typelab.exceptions import GridError, ValidationError
from typelab.execution import STRICT
from typelab.quadrature import integrate, piecewise_linear_integral
from typelab.trends import Trend, classify, classify_terms, trend_record

logger = logging.getLogger(__name__)

_EMPTY = np.zeros(0)


def _as_array(values):
    return np.array(values, dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """Nonnegative density, linear between samples and zero outside ``[grid[0], grid[-1]]``.

    ``tail="constant"`` declares that the density continues beyond the window at
    its edge values; only the Phi-transform uses that declaration.
    """

    grid: np.ndarray
    values: np.ndarray
    tail: str = "none"

    def __post_init__(self):
        grid = _as_array(self.grid)
        values = _as_array(self.values)
        if grid.size < 2 or grid.size != values.size:
            raise ValidationError("density needs at least two samples and one value per grid point")
        if np.any(np.diff(grid) <= 0):
            raise ValidationError("density grid must be strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValidationError("density values must be finite and nonnegative")
        if self.tail not in ("none", "constant"):
            raise ValidationError(f"unknown density tail {self.tail!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def window(self):
        return float(self.grid[0]), float(self.grid[-1])

    def __call__(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def integrate(self, weight, lo, hi):
        return piecewise_linear_integral(self.grid, self.values, weight, lo, hi)

    def cumulative(self, x):
        """Exact integral of the density over (-inf, x], vectorised."""
        x = np.asarray(x, dtype=float)
        node_cum = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(self.grid) * (self.values[:-1] + self.values[1:]))))
        clipped = np.clip(x, self.grid[0], self.grid[-1])
        idx = np.clip(np.searchsorted(self.grid, clipped, side="right") - 1, 0, self.grid.size - 2)
        start = self.grid[idx]
        width = self.grid[idx + 1] - start
        slope = (self.values[idx + 1] - self.values[idx]) / width
        d = clipped - start
        return node_cum[idx] + self.values[idx] * d + 0.5 * slope * d * d

    def total(self):
        return float(self.cumulative(self.grid[-1]))

    def scaled(self, factor):
        return SampledDensity(self.grid, self.values * factor, self.tail)

    def equals(self, other):
        return (
            isinstance(other, SampledDensity)
            and self.tail == other.tail
            and np.array_equal(self.grid, other.grid)
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """mu = mu_R + mu_iR: real atoms, an optional sampled density, and atoms at +-i*height."""

    positions: np.ndarray = field(default_factory=lambda: _EMPTY)
    masses: np.ndarray = field(default_factory=lambda: _EMPTY)
    density: SampledDensity | None = None
    imag_heights: np.ndarray = field(default_factory=lambda: _EMPTY)
    imag_masses: np.ndarray = field(default_factory=lambda: _EMPTY)
    symmetric: bool = False
    truncation_radius: float | None = None
    lattice_tail: bool = False

    def __post_init__(self):
        positions = _as_array(self.positions)
        masses = _as_array(self.masses)
        heights = _as_array(self.imag_heights)
        imag_masses = _as_array(self.imag_masses)
        if positions.size != masses.size or heights.size != imag_masses.size:
            raise ValidationError("every atom needs exactly one mass")
        if np.any(np.diff(positions) <= 0):
            raise ValidationError("atom positions must be strictly increasing")
        if np.any(masses <= 0) or np.any(imag_masses <= 0):
            raise ValidationError("atom masses must be strictly positive")
        if np.any(heights <= 0):
            raise ValidationError("imaginary atom heights must be positive")
        if not (np.all(np.isfinite(positions)) and np.all(np.isfinite(masses))):
            raise ValidationError("atoms must be finite")
        order = np.argsort(heights, kind="stable")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "imag_heights", heights[order])
        object.__setattr__(self, "imag_masses", imag_masses[order])
        if self.symmetric:
            if not (np.array_equal(positions, -positions[::-1]) and np.array_equal(masses, masses[::-1])):
                raise ValidationError("measure is flagged symmetric but its atoms are not")
            if self.density is not None and not (
                np.array_equal(self.density.grid, -self.density.grid[::-1])
                and np.array_equal(self.density.values, self.density.values[::-1])
            ):
                raise ValidationError("measure is flagged symmetric but its density is not")
        radius = self.truncation_radius
        if radius is None:
            extent = [float(np.max(np.abs(positions)))] if positions.size else [0.0]
            if self.density is not None:
                extent.append(max(abs(self.density.window[0]), abs(self.density.window[1])))
            radius = max(extent)
        if radius < 0 or math.isnan(radius):
            raise ValidationError("truncation radius must be nonnegative")
        object.__setattr__(self, "truncation_radius", float(radius))

    # -- constructors -------------------------------------------------------

    @classmethod
    def atomic(cls, positions, masses=None, **kwargs):
        positions = _as_array(positions)
        masses = np.ones_like(positions) if masses is None else _as_array(masses)
        return cls(positions=positions, masses=masses, **kwargs)

    @classmethod
    def lattice(cls, step, count, mass=1.0, offset=0.0, **kwargs):
        """Atoms ``offset + n*step`` for ``|n| <= count``."""
        n = np.arange(-count, count + 1, dtype=float)
        positions = offset + n * step
        kwargs.setdefault("symmetric", offset == 0.0)
        kwargs.setdefault("lattice_tail", offset == 0.0)
        return cls.atomic(positions, np.full(positions.size, float(mass)), **kwargs)

    @classmethod
    def lebesgue(cls, level, radius, points=2, tail="none"):
        grid = np.linspace(-radius, radius, points)
        grid = 0.5 * (grid - grid[::-1])
        density = SampledDensity(grid, np.full(points, float(level)), tail=tail)
        return cls(density=density, symmetric=True, truncation_radius=float(radius))

    @classmethod
    def from_density(cls, func, radius, points, tail="none"):
        grid = np.linspace(-radius, radius, points)
        grid = 0.5 * (grid - grid[::-1])
        values = np.asarray(func(grid), dtype=float)
        symmetric = bool(np.array_equal(values, values[::-1]))
        return cls(density=SampledDensity(grid, values, tail=tail), symmetric=symmetric,
                   truncation_radius=float(radius))

    @classmethod
    def from_dict(cls, data):
        atoms = np.asarray(data.get("real_atoms") or np.zeros((0, 2)), dtype=float).reshape(-1, 2)
        imag = np.asarray(data.get("imag_atoms") or np.zeros((0, 2)), dtype=float).reshape(-1, 2)
        density = None
        if data.get("real_density"):
            raw = data["real_density"]
            density = SampledDensity(raw["grid"], raw["values"], raw.get("tail", "none"))
        return cls(
            positions=atoms[:, 0], masses=atoms[:, 1], density=density,
            imag_heights=imag[:, 0], imag_masses=imag[:, 1],
            symmetric=bool(data.get("symmetric", False)),
            truncation_radius=data.get("truncation_radius"),
            lattice_tail=bool(data.get("lattice_tail", False)),
        )

    def to_dict(self):
        data = {
            "symmetric": self.symmetric,
            "real_atoms": np.column_stack((self.positions, self.masses)).tolist(),
            "real_density": None,
            "imag_atoms": np.column_stack((self.imag_heights, self.imag_masses)).tolist(),
            "truncation_radius": self.truncation_radius,
        }
        if self.density is not None:
            data["real_density"] = {
                "grid": self.density.grid.tolist(),
                "values": self.density.values.tolist(),
                "tail": self.density.tail,
            }
        if self.lattice_tail:
            data["lattice_tail"] = True
        return data

    # -- queries -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SpectralMeasure):
            return NotImplemented
        same_density = (self.density is None and other.density is None) or (
            self.density is not None and self.density.equals(other.density)
        )
        return (
            same_density
            and self.symmetric == other.symmetric
            and self.lattice_tail == other.lattice_tail
            and self.truncation_radius == other.truncation_radius
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.masses, other.masses)
            and np.array_equal(self.imag_heights, other.imag_heights)
            and np.array_equal(self.imag_masses, other.imag_masses)
        )

    __hash__ = None

    @property
    def is_atomic(self):
        return self.density is None

    def _cumulative_masses(self):
        return np.concatenate(([0.0], np.cumsum(self.masses)))

    def mass(self, lo, hi):
        """mu_R of the closed interval [lo, hi], vectorised over arrays of endpoints."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        cum = self._cumulative_masses()
        atomic = (cum[np.searchsorted(self.positions, hi, side="right")]
                  - cum[np.searchsorted(self.positions, lo, side="left")])
        if self.density is None:
            return atomic
        return atomic + self.density.cumulative(hi) - self.density.cumulative(lo)

    def integrate(self, weight, radius=None, execution=STRICT):
        """Integral of a vectorised weight over |lambda| <= radius (real part only)."""
        radius = self.truncation_radius if radius is None else radius
        inside = np.abs(self.positions) <= radius
        total = execution.total(self.masses[inside] * weight(self.positions[inside])) if np.any(inside) else 0.0
        if self.density is not None:
            total += self.density.integrate(weight, -radius, radius)
        return total

    def scaled(self, factor):
        density = None if self.density is None else self.density.scaled(factor)
        return SpectralMeasure(self.positions, self.masses * factor, density, self.imag_heights,
                               self.imag_masses * factor, self.symmetric, self.truncation_radius,
                               self.lattice_tail)

    def real_atoms(self):
        return self.positions, self.masses

    def lattice_step(self):
        """Spacing h when the real part is atoms on an arithmetic progression, else None."""
        if self.density is not None or self.imag_heights.size or self.positions.size < 2:
            return None
        gaps = np.diff(self.positions)
        if np.allclose(gaps, gaps[0], rtol=1e-12, atol=0.0):
            return float(gaps[0])
        return None


# -- growth -------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    windows: tuple
    partials: dict
    trends: dict
    minimal_s: float | None
    radius: float

    def serialize(self):
        return {
            "windows": list(self.windows),
            "per_s": [
                {"s": s, **trend_record(self.windows, self.partials[s], self.trends[s])}
                for s in sorted(self.partials)
            ],
            "minimal_s": self.minimal_s,
            "radius": self.radius,
        }


def _check_windows(windows):
    windows = [float(w) for w in windows]
    if len(windows) < 1 or any(b <= a for a, b in zip(windows, windows[1:])):
        raise ValidationError("windows must be a strictly increasing sequence")
    return windows


def polynomial_growth_exponent(mu, s_grid, windows, execution=STRICT):
    """Smallest s on the grid for which the windowed integrals of 1/(1+|x|^{2s}) converge."""
    s_values = sorted(float(s) for s in s_grid)
    if not s_values:
        raise ValidationError("s_grid is empty")
    windows = _check_windows(windows)
    if float(mu.mass(-windows[-1], windows[-1])) <= 0.0:
        raise ValidationError("measure has no content on the largest window")
    partials, trends = {}, {}
    for s in s_values:
        def weight(x, s=s):
            return 1.0 / (1.0 + np.abs(x) ** (2.0 * s))

        partials[s] = [mu.integrate(weight, radius=w, execution=execution) for w in windows]
        trends[s] = classify(partials[s])
    minimal = next((s for s in s_values if trends[s] is Trend.CONVERGED), None)
    logger.info("growth exponent over %d windows: minimal s = %s", len(windows), minimal)
    return GrowthReport(tuple(windows), partials, trends, minimal, mu.truncation_radius)


# -- majorization -------------------------------------------------------------


@dataclass(frozen=True)
class ExpInterval:
    """The interval ``[x - k e^{-delta|x|}, x + k e^{-delta|x|}]``."""

    center: float
    delta: float
    scale: float = 1.0

    def __post_init__(self):
        if self.delta <= 0 or self.scale <= 0:
            raise ValidationError("decay rate and scale must be positive")

    @property
    def half_length(self):
        return self.scale * math.exp(-self.delta * abs(self.center))

    @property
    def bounds(self):
        half = self.half_length
        return self.center - half, self.center + half


@dataclass(frozen=True)
class MajorizationParams:
    delta: float
    n: int
    C: float

    def __post_init__(self):
        if self.delta <= 0 or self.C <= 0 or self.n < 0:
            raise ValidationError("majorization needs delta > 0, C > 0 and n >= 0")


@dataclass(frozen=True)
class MajorizationWitness:
    """Outcome of one majorization scan; no violations means it holds on the grid."""

    delta: float
    C: float
    n: int
    violations: tuple
    centres_checked: int
    radius: float

    @property
    def holds(self):
        return not self.violations

    def serialize(self):
        return {
            "delta": self.delta, "C": self.C, "n": self.n,
            "violations": [float(v) for v in self.violations],
            "centres_checked": self.centres_checked,
            "radius": self.radius,
            "verdict": "holds" if self.holds else "fails",
        }


def _interval_masses(mu, centres, delta, scale):
    half = scale * np.exp(-delta * np.abs(centres))
    return np.asarray(mu.mass(centres - half, centres + half), dtype=float)


def _majorization_centres(mu, mu_tilde, delta, x_grid):
    grid = np.unique(_as_array(x_grid))
    radius = max(mu.truncation_radius, mu_tilde.truncation_radius)
    divisor = DEFAULTS["measure"]["grid_guard_divisor"]
    for measure in (mu, mu_tilde):
        if measure.density is None:
            continue
        lo, hi = measure.density.window
        if grid.size < 2 or grid[0] > lo or grid[-1] < hi:
            raise GridError(f"grid does not cover the density window [{lo}, {hi}]")
        inside = grid[(grid >= lo) & (grid <= hi)]
        reach = float(np.max(np.abs(inside)))
        spacing = float(np.max(np.diff(inside)))
        if spacing > math.exp(-delta * reach) / divisor:
            raise GridError(
                f"grid spacing {spacing:.3g} is coarser than e^(-delta R)/{divisor:g} = "
                f"{math.exp(-delta * reach) / divisor:.3g} at R = {reach:g}"
            )
    atoms = mu.positions[np.abs(mu.positions) <= radius]
    return np.union1d(grid, atoms)


def majorization_check(mu, mu_tilde, delta, n, C, x_grid):
    """Evaluate mu(I_x) <= C(1+|x|)^n (mu_tilde(2 I_x) + e^{-2 delta |x|}) at every centre."""
    params = MajorizationParams(float(delta), int(n), float(C))
    centres = _majorization_centres(mu, mu_tilde, params.delta, x_grid)
    lhs = _interval_masses(mu, centres, params.delta, 1.0)
    rhs = params.C * (1.0 + np.abs(centres)) ** params.n * (
        _interval_masses(mu_tilde, centres, params.delta, 2.0) + np.exp(-2.0 * params.delta * np.abs(centres))
    )
    bad = lhs > rhs * (1.0 + 1e-12)
    witness = MajorizationWitness(
        params.delta, params.C, params.n, tuple(float(x) for x in centres[bad]), int(centres.size),
        max(mu.truncation_radius, mu_tilde.truncation_radius),
    )
    logger.info("majorization (delta=%g, n=%d, C=%g): %d violations over %d centres",
                params.delta, params.n, params.C, len(witness.violations), centres.size)
    return witness


def majorization_search(mu, mu_tilde, deltas, ns, Cs, x_grid):
    """First (delta, n, C) in lexicographic order with no violations, or None."""
    for delta in deltas:
        for n in ns:
            for C in Cs:
                witness = majorization_check(mu, mu_tilde, delta, n, C, x_grid)
                if witness.holds:
                    return witness
    return None


@dataclass(frozen=True)
class EquivalenceReport:
    forward: MajorizationWitness
    backward: MajorizationWitness

    @property
    def equivalent(self):
        return self.forward.holds and self.backward.holds

    def serialize(self):
        return {
            "forward": self.forward.serialize(),
            "backward": self.backward.serialize(),
            "verdict": "weakly equivalent on tested grid" if self.equivalent else "not shown equivalent",
        }


def weak_equivalence_check(mu, nu, forward, backward, x_grid):
    """Majorization both ways; ``forward`` witnesses mu <= nu and ``backward`` nu <= mu."""
    return EquivalenceReport(
        majorization_check(mu, nu, forward.delta, forward.n, forward.C, x_grid),
        majorization_check(nu, mu, backward.delta, backward.n, backward.C, x_grid),
    )


# -- tails ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TailFunction:
    """psi(lambda) = (mu_R - mu_0)((lambda, inf)), exact on atoms.

    ``breakpoints`` are the merged atom positions; ``suffix[i]`` is the value of the
    atomic part on ``[breakpoints[i-1], breakpoints[i])``.
    """

    breakpoints: np.ndarray
    suffix: np.ndarray
    densities: tuple
    radius: float

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        value = self.suffix[np.searchsorted(self.breakpoints, lam, side="right")]
        for density, sign in self.densities:
            value = value + sign * (density.total() - density.cumulative(lam))
        return np.where(lam >= self.radius, 0.0, value)

    @property
    def has_density(self):
        return bool(self.densities)


def tail_difference(mu_r, mu_0, lam_grid=None):
    """Signed tail psi of mu_r - mu_0; returns the tail function and its grid samples."""
    if not math.isclose(mu_r.truncation_radius, mu_0.truncation_radius, rel_tol=1e-12, abs_tol=0.0):
        raise ValidationError(
            f"truncation radii differ: {mu_r.truncation_radius} vs {mu_0.truncation_radius}"
        )
    positions = np.concatenate((mu_r.positions, mu_0.positions))
    masses = np.concatenate((mu_r.masses, -mu_0.masses))
    merged, inverse = np.unique(positions, return_inverse=True)
    signed = np.zeros(merged.size)
    np.add.at(signed, inverse, masses)
    suffix = np.concatenate((np.cumsum(signed[::-1])[::-1], [0.0]))
    densities = tuple((d, s) for d, s in ((mu_r.density, 1.0), (mu_0.density, -1.0)) if d is not None)
    psi = TailFunction(merged, suffix, densities, mu_r.truncation_radius)
    samples = None if lam_grid is None else psi(_as_array(lam_grid))
    return psi, samples


def _proximity_integral(psi, delta, upper):
    """Integral of e^{delta lambda} |psi(lambda)| over [0, upper]."""
    upper = min(upper, psi.radius)
    if upper <= 0:
        return 0.0
    if psi.has_density:
        cuts = tuple(float(b) for b in psi.breakpoints if 0 < b < upper)
        return integrate(lambda t: math.exp(delta * t) * abs(float(psi(t))), 0.0, upper, breakpoints=cuts)
    edges = np.concatenate(([0.0], psi.breakpoints[(psi.breakpoints > 0) & (psi.breakpoints < upper)], [upper]))
    left, right = edges[:-1], edges[1:]
    values = np.abs(psi.suffix[np.searchsorted(psi.breakpoints, left, side="right")])
    pieces = values * np.exp(delta * left) * np.expm1(delta * (right - left)) / delta
    return math.fsum(pieces[values > 0])


def proximity_test(psi, delta, windows=None):
    """Certificate on finiteness of the integral of e^{delta lambda}|psi| over [0, inf)."""
    if delta <= 0:
        raise ValidationError("delta must be positive")
    radius = psi.radius
    windows = _check_windows(windows if windows is not None else np.linspace(radius / 8.0, radius, 8))
    partials = [_proximity_integral(psi, delta, w) for w in windows]
    value = _proximity_integral(psi, delta, radius)
    trend = classify(partials)
    beyond = np.concatenate(([windows[-1]], psi.breakpoints[psi.breakpoints > windows[-1]]))
    tail_nonzero = bool(np.any(np.abs(psi(beyond[beyond < radius])) > 0)) or (
        psi.has_density and windows[-1] < radius
    )
    reason = None
    if trend is Trend.GROWING:
        verdict = Verdict.FAILS
    elif tail_nonzero:
        verdict, reason = Verdict.INCONCLUSIVE, "psi is not eventually zero within the windows"
    elif trend is Trend.CONVERGED:
        verdict = Verdict.HOLDS
    else:
        verdict, reason = Verdict.INCONCLUSIVE, "window trend inconclusive"
    evidence = trend_record(windows, partials, trend)
    if reason:
        evidence["reason"] = reason
    return Certificate(
        statement="proximity",
        anchor="integral over (0, inf) of e^(delta lambda) |psi(lambda)| is finite",
        verdict=verdict, value=value, params={"delta": delta}, evidence=evidence, radius=radius,
    )


def imag_tail_test(mu, delta, mode="gaussian", x=None, execution=STRICT):
    """Certificate on the weighted sum over imaginary atoms (gaussian or exponential weight)."""
    heights, masses = mu.imag_heights, mu.imag_masses
    if mode == "gaussian":
        if delta <= 0:
            raise ValidationError("delta must be positive")
        log_terms = np.log(masses) + delta * heights ** 2
        params = {"delta": delta, "mode": mode}
    elif mode == "exponential":
        if x is None:
            raise ValidationError("exponential mode needs x")
        log_terms = np.log(masses) + float(x) * heights
        params = {"x": float(x), "mode": mode}
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    with np.errstate(over="ignore"):
        terms = np.exp(log_terms)
    value = execution.total(terms) if terms.size else 0.0
    if terms.size < 4:
        trend = Trend.CONVERGED
        evidence = {"terms": terms, "trend": trend.value, "reason": "finitely many atoms"}
    else:
        trend = classify_terms(terms)
        evidence = {"terms": terms, "trend": trend.value}
    verdict = {Trend.CONVERGED: Verdict.HOLDS, Trend.GROWING: Verdict.FAILS}.get(trend, Verdict.INCONCLUSIVE)
    return Certificate(
        statement="imaginary_tail",
        anchor="weighted mass of the imaginary-axis atoms is finite",
        verdict=verdict, value=value, direction=Direction.UPPER_BOUND, params=params,
        evidence=evidence,
        radius=float(heights[-1]) if heights.size else 0.0,
    )
