"""entire eval | krein | annihilate | counting | exclude | shift | bounds | lq7"""
import math

import click
import numpy as np

from typelab.commands import entire_bp
from typelab.commands.common import COMPLEX, FLOATS, GRID, RATIONAL, job, product_options, resolve_product
from typelab.converters import FUNCTION, MEASURE, WEIGHT
from typelab.counting import counting as counting_profile
from typelab.counting import krein_exclusion
from typelab.exceptions import ValidationError, ZeroOfProductError
from typelab.nodes import build_lq7
from typelab.perturbation import interval_constant, lf_bounds_check, shift_zeros
from typelab.products import TailPolicy, annihilation_residual, eval_product, krein_sum
from typelab.weights import constant


def _points(measure, family, count, zeros):
    if measure is not None:
        if family is not None or zeros is not None:
            raise ValidationError("give either --measure or a product, not both")
        return measure.value.positions
    return resolve_product(family, count, zeros).all_zeros()


@entire_bp.cli.command("eval")
@product_options
@click.option("--z", "points", type=COMPLEX, multiple=True, required=True)
@click.option("--N", "N", type=int, default=None, help="Zero pairs to use; default all stored.")
@click.option("--tail", type=click.Choice([p.value for p in TailPolicy]), default=TailPolicy.NONE.value,
              show_default=True)
@job("entire eval")
def evaluate(record, execution, family, count, zeros, points, N, tail):
    """log|F(z)| with sign or phase, and the tail error bar."""
    F = resolve_product(family, count, zeros)
    for z in points:
        try:
            result = eval_product(F, z, N, tail, execution)
        except ZeroOfProductError:
            record.rows.append({"re": z.real, "im": z.imag, "log_abs": -math.inf, "value_re": 0.0,
                                "value_im": 0.0, "error_bar": 0.0})
            continue
        value = complex(result.value)
        record.rows.append({"re": z.real, "im": z.imag, "log_abs": result.log_abs, "value_re": value.real,
                            "value_im": value.imag, "error_bar": result.error_bar})
    record.summary = {"product": F.name, "zeros": F.count, "tail_policy": tail}


@entire_bp.cli.command("krein")
@product_options
@click.option("--weight", type=WEIGHT, default=None, help="W in the sum; default W = 1.")
@job("entire krein")
def krein(record, execution, family, count, zeros, weight):
    """Convergence of the sum of W(lambda)/|F'(lambda)| over the zeros."""
    F = resolve_product(family, count, zeros)
    record.add_certificate(krein_sum(F, constant() if weight is None else weight.value, execution))


@entire_bp.cli.command("annihilate")
@product_options
@click.option("--f", "function", type=FUNCTION, required=True)
@click.option("--N", "N", type=int, default=None)
@click.option("--tolerance", type=float, default=None)
@job("entire annihilate")
def annihilate(record, execution, family, count, zeros, function, N, tolerance):
    """|sum f(lambda)/B'(lambda)| with a bound on the unevaluated zeros."""
    B = resolve_product(family, count, zeros)
    record.summary = annihilation_residual(B, function.value, N, tolerance, execution).serialize()


@entire_bp.cli.command("counting")
@click.option("--measure", type=MEASURE, default=None, help="Take the points from a measure's atoms.")
@product_options
@click.option("--grid", type=GRID, required=True)
@click.option("--c", type=float, default=None)
@job("entire counting")
def counting(record, execution, measure, family, count, zeros, grid, c):
    """n(t) and N(R) on a grid."""
    del execution
    profile = counting_profile(_points(measure, family, count, zeros), grid, c)
    record.rows = profile.rows()
    record.summary = {"points": int(grid.size), "c": c}


@entire_bp.cli.command("exclude")
@click.option("--measure", type=MEASURE, default=None)
@product_options
@click.option("--c", type=float, required=True)
@click.option("--A", "A_list", type=FLOATS, default="1,10,100", show_default=True)
@click.option("--R-max", "R_max", type=float, required=True)
@job("entire exclude")
def exclude(record, execution, measure, family, count, zeros, c, A_list, R_max):
    """Krein-class exclusion through n(t) - 2t/c."""
    del execution
    record.add_certificate(krein_exclusion(_points(measure, family, count, zeros), c, A_list, R_max))


@entire_bp.cli.command("shift")
@product_options
@click.option("--delta", type=float, required=True)
@click.option("--M", "M", type=float, required=True, help="Zeros at or below M are left out of B_1.")
@click.option("--fraction", type=click.FloatRange(-1.0, 1.0), default=0.5, show_default=True,
              help="Each moved zero travels this fraction of k1 e^{-delta lambda}.")
@job("entire shift")
def shift(record, execution, family, count, zeros, delta, M, fraction):
    """Move zeros inside their k1-windows and measure the deviation of the factors."""
    del execution
    B = resolve_product(family, count, zeros)
    k1 = interval_constant(delta)
    moved = B.positive_zeros[B.positive_zeros > M]
    targets = {float(lam): float(lam + fraction * k1 * math.exp(-delta * lam)) for lam in moved}
    report = shift_zeros(B, targets, M, delta)
    record.summary = report.serialize()
    record.rows = [{"zeta": z, "deviation": d} for z, d in zip(report.shifted, report.deviations)]
    record.attachments["zeros.json"] = report.product.to_dict()


@entire_bp.cli.command("bounds")
@product_options
@click.option("--delta", type=float, required=True)
@click.option("--grid", type=GRID, required=True)
@click.option("--c-required", type=float, default=None)
@job("entire bounds")
def bounds(record, execution, family, count, zeros, delta, grid, c_required):
    """Growth threshold of |B|+|B'|+|B''| and the separation constant of the zeros."""
    del execution
    B = resolve_product(family, count, zeros)
    record.summary = lf_bounds_check(B, delta, grid, c_required).serialize()


@entire_bp.cli.command("lq7")
@click.option("--eta", type=RATIONAL, default="1/10", show_default=True, help="Constant node gap.")
@click.option("--K-max", "K_max", type=int, required=True)
@click.option("--B", "B", type=FLOATS, default="", help="Indices k in the class B.")
@job("entire lq7")
def lq7(record, execution, eta, K_max, B):
    """Place the node quadruples and report min |G'|/eta_k."""
    result = build_lq7(lambda k: eta, K_max, [int(k) for k in B], execution=execution)
    record.summary = {key: value for key, value in result.serialize().items() if key not in ("ratios", "nodes")}
    record.rows = [{**node, "ratio": float(ratio)}
                   for node, ratio in zip(result.nodes.serialize(K_max + 1), result.ratios)]
    record.summary["all_ratios_positive"] = bool(np.all(np.asarray(result.ratios) > 0))
