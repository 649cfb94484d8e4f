"""certify <statement>: issue one type certificate and check it against the reference models."""
import math

import click
import numpy as np

from typelab.commands import top_bp
from typelab.commands.common import GRID, job, product_options, resolve_product
from typelab.converters import FUNCTION, MEASURE, WEIGHT
from typelab.exceptions import ValidationError
from typelab.type_certificates import (
    annihilator_lower_bound, coherence_check, duffin_schaeffer, koosis_lattice, reference_for, reference_type,
    szego_infinite_type, zero_type_certificate,
)

STATEMENTS = ("zero_type", "infinite_type", "duffin_schaeffer", "koosis", "annihilator", "reference")
MODELS = ("arithmetic_progression", "lebesgue", "point_mass")


def _need(value, flag, statement):
    if value is None:
        raise ValidationError(f"{statement} needs {flag}")
    return value


def _masses_at_integers(mu):
    lookup = {float(x): float(m) for x, m in zip(mu.positions, mu.masses) if float(x).is_integer()}

    def log_omega(n):
        with np.errstate(divide="ignore"):
            return np.log(np.array([lookup.get(float(k), 0.0) for k in n]))

    return log_omega


def _koosis(record, omega, measure, N_max):
    if omega == "ones":
        return koosis_lattice(np.zeros_like, N_max)
    if omega is not None:
        loaded = WEIGHT.convert(omega, None, None)
        record.inputs["omega"] = loaded.path
        return koosis_lattice(loaded.value.log, N_max)
    mu = _need(measure, "--measure or --omega", "koosis").value
    return koosis_lattice(_masses_at_integers(mu), int(mu.truncation_radius) if N_max is None else N_max)


def _reference_model(model, ell):
    if model == "arithmetic_progression":
        return reference_type(model, ell=1.0 if ell is None else ell)
    if ell is not None:
        raise ValidationError(f"--ell applies to arithmetic_progression, not {model}")
    return reference_type(model)


@top_bp.cli.command("certify")
@click.argument("statement_arg", metavar="STATEMENT", required=False, type=click.Choice(STATEMENTS))
@click.option("--statement", type=click.Choice(STATEMENTS), default=None)
@click.option("--measure", type=MEASURE, default=None)
@click.option("--weight", type=WEIGHT, default=None, help="K for zero_type.")
@click.option("--L", "L", type=float, default=None)
@click.option("--delta", type=float, default=None)
@click.option("--grid", type=GRID, default=None)
@click.option("--omega", default=None, help="'ones' or a function file with omega(n).")
@click.option("--N-max", "N_max", type=int, default=None)
@product_options
@click.option("--f", "functions", type=FUNCTION, multiple=True, help="Test functions of type below a.")
@click.option("--a", type=float, default=None)
@click.option("--model", type=click.Choice(MODELS), default=None, help="Reference model by name.")
@click.option("--ell", type=float, default=None, help="Step of the arithmetic progression.")
@job("certify")
def certify(record, execution, statement_arg, statement, measure, weight, L, delta, grid, omega, N_max,
            family, count, zeros, functions, a, model, ell):
    """Issue a certificate on the exponential type of a measure."""
    statement = statement or statement_arg
    if statement is None:
        raise ValidationError("name a statement")
    mu = None if measure is None else measure.value
    if statement == "zero_type":
        K = _need(weight, "--weight", statement).value
        certificate = zero_type_certificate(_need(mu, "--measure", statement), K)
    elif statement == "infinite_type":
        certificate = szego_infinite_type(_need(mu, "--measure", statement))
    elif statement == "duffin_schaeffer":
        mu = _need(mu, "--measure", statement)
        L = _need(L, "--L", statement)
        if grid is None:
            reach = mu.truncation_radius - L
            if not reach > 0:
                raise ValidationError("measure is too short for the window; give --grid")
            grid = np.arange(-reach, reach + L / 8.0, L / 8.0)
        certificate = duffin_schaeffer(mu, L, _need(delta, "--delta", statement), grid)
    elif statement == "koosis":
        certificate = _koosis(record, omega, measure, N_max)
    elif statement == "annihilator":
        H = resolve_product(family, count, zeros)
        if not functions:
            raise ValidationError("annihilator needs at least one --f")
        certificate = annihilator_lower_bound(_need(mu, "--measure", statement), H,
                                              [f.value for f in functions], a, execution=execution)
    elif model is not None:
        if mu is not None:
            raise ValidationError("reference takes exactly one of --measure or --model")
        certificate = _reference_model(model, ell)
    else:
        certificate = reference_for(_need(mu, "--measure or --model", statement))
        if certificate is None:
            raise ValidationError("the measure matches no reference model")
    record.add_certificate(certificate)
    reference = None if mu is None else reference_for(mu)
    if reference is not None and statement != "reference":
        record.summary = {"reference": reference.serialize(),
                          "coherence": coherence_check([certificate], reference).serialize()}
    elif statement == "koosis":
        record.summary = {"reference_value": math.pi}
