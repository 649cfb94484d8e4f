"""sharpness thm15i | lq1 | thm15ii | logint"""
import click

from typelab.commands import sharpness_bp
from typelab.commands.common import FLOATS, job
from typelab.converters import WEIGHT
from typelab.exceptions import ValidationError
from typelab.sharpness import (
    RATES, EvenWeight, build_lq1, build_thm15i, build_thm15ii, log_integral_report, step_windows,
)

_RATE = click.Choice(sorted(RATES))


def _step_reports(result):
    windows = step_windows(result)
    return {
        "phi": log_integral_report(result.phi, log_windows=windows, min_increment=1.0).serialize(),
        "psi": log_integral_report(result.psi, log_windows=windows).serialize(),
    }


@sharpness_bp.cli.command("thm15i")
@click.option("--rate", type=_RATE, default="inverse_log", show_default=True)
@click.option("--n-max", type=int, default=8, show_default=True)
@job("sharpness thm15i")
def thm15i(record, execution, rate, n_max):
    """Weights phi, psi with divergent and convergent logarithmic integrals."""
    del execution
    result = build_thm15i(RATES[rate](), n_max)
    record.summary = {**result.serialize(), "log_integrals": _step_reports(result)}
    record.rows = [{**step.serialize(), **{f"check_{k}": v for k, v in step.checks().items()}}
                   for step in result.steps]


@sharpness_bp.cli.command("lq1")
@click.option("--rate", type=_RATE, default="inverse_log", show_default=True)
@click.option("--k-max", type=int, default=6, show_default=True)
@click.option("--y1", type=float, default=10.0, show_default=True)
@job("sharpness lq1")
def lq1(record, execution, rate, k_max, y1):
    """Separated intervals [y_k, 2 y_k] and the piecewise linear phi."""
    del execution
    result = build_lq1(RATES[rate](), k_max, y1)
    record.summary = result.serialize()
    record.rows = list(result.checks)


@sharpness_bp.cli.command("thm15ii")
@click.option("--rate", type=_RATE, default="inverse_log", show_default=True)
@click.option("--K-max", "K_max", type=int, default=100, show_default=True)
@click.option("--k-max", "k_max", type=int, default=4, show_default=True, help="Intervals to build.")
@click.option("--y1", type=float, default=10.0, show_default=True)
@click.option("--test-b", "test_bs", type=FLOATS, default="1,1.5", show_default=True)
@click.option("--counter-b", type=float, default=3.0, show_default=True)
@job("sharpness thm15ii")
def thm15ii(record, execution, rate, K_max, k_max, y1, test_bs, counter_b):
    """Nodes with paired gaps inside the intervals and annihilation by G."""
    del execution
    epsilon = RATES[rate]()
    result = build_thm15ii(epsilon, K_max, build_lq1(epsilon, k_max, y1), test_bs, counter_b)
    record.summary = result.serialize()
    record.rows = list(result.pairs)


@sharpness_bp.cli.command("logint")
@click.option("--weight", type=WEIGHT, default=None, help="An even weight from a function file.")
@click.option("--of", "of", type=click.Choice(["phi", "psi"]), default=None,
              help="One of the weights built by thm15i.")
@click.option("--rate", type=_RATE, default="inverse_log", show_default=True)
@click.option("--n-max", type=int, default=8, show_default=True)
@click.option("--windows", type=FLOATS, default=None)
@job("sharpness logint")
def logint(record, execution, weight, of, rate, n_max, windows):
    """Convergence of the integral of log(1/w(x))/(1+x^2)."""
    del execution
    if (weight is None) == (of is None):
        raise ValidationError("give exactly one of --weight and --of")
    if weight is not None:
        w = weight.value
        even = EvenWeight.from_callable(lambda x: w(abs(x)), name=w.name)
        record.summary = log_integral_report(even, windows=windows).serialize()
        return
    result = build_thm15i(RATES[rate](), n_max)
    record.summary = _step_reports(result)[of]
