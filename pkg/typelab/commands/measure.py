"""measure growth | majorize | equiv | proximity | imagtail"""
import click
import numpy as np

from typelab.commands import measure_bp
from typelab.commands.common import FLOATS, GRID, job
from typelab.converters import MEASURE
from typelab.measures import (
    MajorizationParams, imag_tail_test, majorization_check, majorization_search, polynomial_growth_exponent,
    proximity_test, tail_difference, weak_equivalence_check,
)
from typelab.trends import geometric_ladder

_EMPTY_GRID = np.zeros(0)


@measure_bp.cli.command("growth")
@click.option("--measure", type=MEASURE, required=True)
@click.option("--s", "s_grid", type=FLOATS, default="0.25,0.5,0.75,1,1.5,2", show_default=True)
@click.option("--windows", type=FLOATS, default=None, help="Window radii; default is a geometric ladder.")
@job("measure growth")
def growth(record, execution, measure, s_grid, windows):
    """Smallest s for which the measure integrates 1/(1+|x|^{2s})."""
    mu = measure.value
    windows = windows or geometric_ladder(mu.truncation_radius)
    report = polynomial_growth_exponent(mu, s_grid, windows, execution)
    record.summary = report.serialize()
    record.rows = [{"s": s, "window": w, "partial": p}
                   for s in sorted(report.partials) for w, p in zip(report.windows, report.partials[s])]


@measure_bp.cli.command("majorize")
@click.option("--measure", type=MEASURE, required=True, help="The majorized measure mu.")
@click.option("--reference", type=MEASURE, required=True, help="The majorant mu-tilde.")
@click.option("--delta", type=FLOATS, required=True, help="One value, or several to search.")
@click.option("--n", "ns", type=FLOATS, default="0", show_default=True)
@click.option("--C", "Cs", type=FLOATS, default="1", show_default=True)
@click.option("--grid", type=GRID, default=None, help="Extra centres lo:hi:points.")
@job("measure majorize")
def majorize(record, execution, measure, reference, delta, ns, Cs, grid):
    """Check mu(I_x) <= C(1+|x|)^n (mu-tilde(2 I_x) + e^{-2 delta |x|}), or search for a witness."""
    del execution
    grid = _EMPTY_GRID if grid is None else grid
    ns = [int(n) for n in ns]
    if len(delta) == len(ns) == len(Cs) == 1:
        witness = majorization_check(measure.value, reference.value, delta[0], ns[0], Cs[0], grid)
        record.summary = witness.serialize()
        record.rows = [{"violation": x} for x in witness.violations]
        return
    witness = majorization_search(measure.value, reference.value, delta, ns, Cs, grid)
    record.summary = {"searched": {"delta": delta, "n": ns, "C": Cs},
                      "witness": None if witness is None else witness.serialize()}


@measure_bp.cli.command("equiv")
@click.option("--measure", type=MEASURE, required=True)
@click.option("--other", type=MEASURE, required=True)
@click.option("--delta", type=float, required=True)
@click.option("--n", type=int, default=0, show_default=True)
@click.option("--C", "C", type=float, default=1.0, show_default=True)
@click.option("--back-delta", type=float, default=None, help="Parameters of the reverse direction; "
              "default is the forward ones.")
@click.option("--back-n", type=int, default=None)
@click.option("--back-C", "back_C", type=float, default=None)
@click.option("--grid", type=GRID, default=None)
@job("measure equiv")
def equiv(record, execution, measure, other, delta, n, C, back_delta, back_n, back_C, grid):
    """Majorization in both directions."""
    del execution
    forward = MajorizationParams(delta, n, C)
    backward = MajorizationParams(
        delta if back_delta is None else back_delta,
        n if back_n is None else back_n,
        C if back_C is None else back_C,
    )
    report = weak_equivalence_check(measure.value, other.value, forward, backward,
                                    _EMPTY_GRID if grid is None else grid)
    record.summary = report.serialize()


@measure_bp.cli.command("proximity")
@click.option("--measure", type=MEASURE, required=True, help="The perturbed measure mu_R.")
@click.option("--reference", type=MEASURE, required=True, help="The base measure mu_0.")
@click.option("--delta", type=float, required=True)
@click.option("--windows", type=FLOATS, default=None)
@click.option("--grid", type=GRID, default=None, help="Where to sample psi for data.csv.")
@job("measure proximity")
def proximity(record, execution, measure, reference, delta, windows, grid):
    """Finiteness of the integral of e^{delta lambda}|psi| for psi the tail difference."""
    del execution
    psi, samples = tail_difference(measure.value, reference.value, grid)
    record.add_certificate(proximity_test(psi, delta, windows))
    if samples is not None:
        record.rows = [{"lambda": float(x), "psi": float(v)} for x, v in zip(grid, samples)]


@measure_bp.cli.command("imagtail")
@click.option("--measure", type=MEASURE, required=True)
@click.option("--delta", type=float, default=1.0, show_default=True)
@click.option("--weighting", type=click.Choice(["gaussian", "exponential"]), default="gaussian",
              show_default=True)
@click.option("--x", type=float, default=None, help="Exponent for the exponential weighting.")
@job("measure imagtail")
def imagtail(record, execution, measure, delta, weighting, x):
    """Weighted mass of the imaginary atoms."""
    record.add_certificate(imag_tail_test(measure.value, delta, weighting, x, execution))
