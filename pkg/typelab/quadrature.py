"""Quadrature helpers on top of scipy.integrate.

``integrate`` splits a range at caller breakpoints and then dyadically away
from each of them, so that a single ``quad`` call never sees a long
featureless stretch next to a kink.
"""
import math

import numpy as np
from scipy import integrate as _integrate
from scipy.special import roots_legendre

from typelab.constants import DEFAULTS

_QUAD = DEFAULTS["quadrature"]


def _dyadic_cuts(lo, hi, anchor):
    """Points anchor ± 1, ± 2, ± 4, ... strictly inside (lo, hi)."""
    cuts = []
    step = 1.0
    while anchor + step < hi:
        if anchor + step > lo:
            cuts.append(anchor + step)
        step *= 2.0
    step = 1.0
    while anchor - step > lo:
        if anchor - step < hi:
            cuts.append(anchor - step)
        step *= 2.0
    return cuts


def pieces(lo, hi, breakpoints=()):
    """Sorted subintervals of [lo, hi] cut at breakpoints and dyadic offsets from them."""
    if not hi > lo:
        return []
    anchors = [b for b in breakpoints if lo <= b <= hi] or [lo]
    cuts = {lo, hi}
    for anchor in anchors:
        cuts.add(anchor)
        cuts.update(_dyadic_cuts(lo, hi, anchor))
    ordered = sorted(cuts)
    return [(a, b) for a, b in zip(ordered, ordered[1:]) if b > a]


def integrate(func, lo, hi, breakpoints=(), epsabs=None, epsrel=None):
    """Integral of a scalar function over [lo, hi] (finite bounds)."""
    epsabs = _QUAD["epsabs"] if epsabs is None else epsabs
    epsrel = _QUAD["epsrel"] if epsrel is None else epsrel
    values = []
    for a, b in pieces(lo, hi, breakpoints):
        value, _ = _integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=_QUAD["limit"])
        values.append(value)
    return math.fsum(values)


def gauss_legendre(lo, hi, count):
    """Nodes and weights of the ``count``-point Gauss-Legendre rule on [lo, hi]."""
    nodes, weights = roots_legendre(count)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def composite_gauss(lo, hi, width, count):
    """Composite Gauss-Legendre nodes and weights on [lo, hi] with panels of at most ``width``."""
    panels = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, panels + 1)
    base_nodes, base_weights = roots_legendre(count)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * base_nodes[None, :]).ravel()
    weights = (half[:, None] * base_weights[None, :]).ravel()
    return nodes, weights


def piecewise_linear_integral(grid, values, weight, lo, hi):
    """Integral over [lo, hi] of the piecewise-linear interpolant of ``values`` times ``weight``.

    ``weight`` is vectorised. Short segments use a fixed Gauss-Legendre rule;
    long segments fall back to :func:`integrate`.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    lo = max(lo, grid[0])
    hi = min(hi, grid[-1])
    if not hi > lo:
        return 0.0
    edges = np.concatenate(([lo], grid[(grid > lo) & (grid < hi)], [hi]))
    width = _QUAD["piece_width"]
    base_nodes, base_weights = roots_legendre(_QUAD["gauss_nodes"])
    short = np.diff(edges) <= width
    parts = []
    if np.any(short):
        a = edges[:-1][short]
        b = edges[1:][short]
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        nodes = mid[:, None] + half[:, None] * base_nodes[None, :]
        density = np.interp(nodes, grid, values)
        parts.extend((half[:, None] * base_weights[None, :] * density * weight(nodes)).ravel())
    for a, b in zip(edges[:-1][~short], edges[1:][~short]):
        pa, pb = np.interp([a, b], grid, values)
        slope = (pb - pa) / (b - a)

        def integrand(x, a=a, pa=pa, slope=slope):
            return (pa + slope * (x - a)) * float(weight(np.asarray(x)))

        parts.append(integrate(integrand, a, b, breakpoints=(0.0,) if a < 0.0 < b else ()))
    return math.fsum(parts)
