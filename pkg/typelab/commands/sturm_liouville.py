"""sl omega | bound | weyl | parseval | phi | glcheck | pairing"""
import math

import click
import numpy as np

from typelab.certificate import Certificate, Verdict
from typelab.commands import sl_bp
from typelab.commands.common import COMPLEX, FLOATS, GRID, job
from typelab.converters import FUNCTION, MEASURE, POTENTIAL
from typelab.exceptions import ValidationError
from typelab.sturm_liouville import (
    gl_check, omega_bound_check, pairing_test, parseval_check, phi_transform, potential_from_dict, solve_omega,
    weyl_transform,
)


def _problem(potential, a=None, h=None):
    """The loaded problem, rebuilt when --a or --h override the file."""
    if a is None and h is None:
        return potential.value
    data = dict(potential.data)
    if a is not None:
        data["a"] = a
    if h is not None:
        data["h"] = h
    return potential_from_dict(data)


@sl_bp.cli.command("omega")
@click.option("--potential", type=POTENTIAL, required=True)
@click.option("--lam", "lams", type=COMPLEX, multiple=True, required=True, help="Spectral parameter; repeat.")
@click.option("--grid", type=GRID, required=True, help="Points x in [0, a).")
@click.option("--step", type=float, default=None, help="Initial integrator step.")
@job("sl omega")
def omega(record, execution, potential, lams, grid, step):
    """omega(lambda, x) and its x-derivative on a grid."""
    del execution
    solution = solve_omega(potential.value, np.asarray(lams, dtype=complex), grid, step)
    record.summary = {"step": solution.step, "discrepancy": solution.discrepancy}
    record.rows = [
        {"lambda_re": lam.real, "lambda_im": lam.imag, "x": float(x),
         "omega_re": float(w.real), "omega_im": float(w.imag), "d_re": float(d.real), "d_im": float(d.imag)}
        for lam, row, drow in zip(solution.lam, solution.omega, solution.derivative)
        for x, w, d in zip(solution.x, row, drow)
    ]


@sl_bp.cli.command("bound")
@click.option("--potential", type=POTENTIAL, required=True)
@click.option("--lam", "lams", type=COMPLEX, multiple=True, required=True)
@click.option("--x", "xs", type=FLOATS, required=True)
@job("sl bound")
def bound(record, execution, potential, lams, xs):
    """Check |omega - cos(lambda x)| against its a priori bound at each (lambda, x)."""
    del execution
    reports = [omega_bound_check(potential.value, lam, x) for lam in lams for x in xs]
    rows = [report.serialize() for report in reports]
    record.rows = [{**{k: v for k, v in row.items() if k != "lambda"},
                    "lambda_re": row["lambda"]["re"], "lambda_im": row["lambda"]["im"]} for row in rows]
    checked = [r for r in reports if not r.vacuous]
    if not checked:
        verdict = Verdict.INCONCLUSIVE
    elif all(r.holds for r in checked):
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.FAILS
    record.add_certificate(Certificate(
        statement="omega_bound",
        anchor="|omega(lambda, x) - cos(lambda x)| <= e^{x|Im lambda|} (Q(x) + |h|) / (|lambda| - Q(x))",
        verdict=verdict,
        value=min((r.slack for r in checked), default=math.nan),
        params={"potential": potential.value.serialize()},
        evidence={"checked": len(checked), "vacuous": len(reports) - len(checked)},
        radius=max(xs, default=0.0),
    ))


@sl_bp.cli.command("weyl")
@click.option("--potential", type=POTENTIAL, required=True)
@click.option("--f", "function", type=FUNCTION, required=True)
@click.option("--lam-grid", type=GRID, required=True)
@job("sl weyl")
def weyl(record, execution, potential, function, lam_grid):
    """Weyl transform of f sampled on a real lambda grid."""
    values = weyl_transform(function.value, potential.value, lam_grid, execution)
    record.rows = [{"lambda": float(lam), "transform": float(v)} for lam, v in zip(lam_grid, values)]
    record.summary = {"max_abs": float(np.max(np.abs(values))) if values.size else 0.0}


@sl_bp.cli.command("parseval")
@click.option("--potential", type=POTENTIAL, required=True)
@click.option("--a", type=float, default=None, help="Override the interval length of the potential file.")
@click.option("--h", type=float, default=None, help="Override the boundary slope.")
@click.option("--measure", type=MEASURE, required=True)
@click.option("--f", "function", type=FUNCTION, required=True)
@click.option("--tolerance", type=float, default=None, help="Tail bound allowed relative to ||f||^2.")
@click.option("--max-error", type=float, default=1e-8, show_default=True,
              help="Relative error for the isometry to hold.")
@job("sl parseval")
def parseval(record, execution, potential, a, h, measure, function, tolerance, max_error):
    """||f||^2 in L2(0, a) against the L2(mu) norm of its Weyl transform."""
    problem = _problem(potential, a, h)
    report = parseval_check(function.value, problem, measure.value, tolerance, execution)
    record.summary = report.serialize()
    record.add_certificate(Certificate(
        statement="weyl_isometry",
        anchor="||f||^2 on (0, a) equals the L2(mu) norm of its Weyl transform",
        verdict=Verdict.HOLDS if report.relative_error <= max_error else Verdict.FAILS,
        value=report.relative_error,
        params={"potential": problem.serialize(), "max_error": max_error},
        evidence=report.serialize(),
        radius=float(measure.value.truncation_radius),
    ))


@sl_bp.cli.command("phi")
@click.option("--measure", type=MEASURE, required=True)
@click.option("--grid", type=GRID, default="0:6:601", show_default=True)
@job("sl phi")
def phi(record, execution, measure, grid):
    """The Phi-transform of a measure on x >= 0."""
    result = phi_transform(measure.value, grid, execution)
    record.rows = result.rows()
    record.summary = result.source


@sl_bp.cli.command("glcheck")
@click.option("--measure", type=MEASURE, required=True)
@click.option("--grid", type=GRID, default="0:0.05:501", show_default=True)
@click.option("--h", type=float, default=None)
@click.option("--a", type=float, default=None)
@job("sl glcheck")
def glcheck(record, execution, measure, grid, h, a):
    """Regularity of Phi at the origin and the boundary slope it implies."""
    result = phi_transform(measure.value, grid, execution)
    record.add_certificate(gl_check(result, h, a))
    record.rows = result.rows()


@sl_bp.cli.command("pairing")
@click.option("--measure", type=MEASURE, required=True)
@click.option("--f", "function", type=FUNCTION, required=True)
@click.option("--a", type=float, default=None)
@click.option("--sigmas", type=FLOATS, default=None, help="Regularisation levels; defaults from defaults.json.")
@click.option("--tolerance", type=float, default=None)
@job("sl pairing")
def pairing(record, execution, measure, function, a, sigmas, tolerance):
    """Pair f-hat with mu and compare with 2 f(0) plus the regularised kernel term."""
    del execution
    if sigmas is not None and not sigmas:
        raise ValidationError("--sigmas needs at least one value")
    report = pairing_test(measure.value, function.value, a, sigmas, tolerance)
    record.summary = report.serialize()
    record.rows = list(report.by_sigma)
    record.add_certificate(Certificate(
        statement="fourier_pairing",
        anchor="integral of f-hat against mu equals 2 f(0) + integral of f M",
        verdict=Verdict.HOLDS if report.passes else Verdict.FAILS,
        value=report.discrepancy,
        params={"a": a, "tolerance": report.tolerance},
        evidence={"lhs": report.lhs, "rhs": report.rhs},
        radius=float(measure.value.truncation_radius),
    ))
