"""weights transform | bakan"""
import click

from typelab.commands import weights_bp
from typelab.commands.common import COMPLEX, FLOATS, GRID, job
from typelab.converters import FUNCTION, MEASURE, WEIGHT
from typelab.weights import bakan_weight, weight_transform


@weights_bp.cli.command("transform")
@click.option("--weight", type=WEIGHT, required=True, help="The weight W-tilde.")
@click.option("--delta", type=float, required=True)
@click.option("--p", type=float, default=0.0, show_default=True)
@click.option("--grid", type=GRID, required=True)
@click.option("--measure", type=MEASURE, default=None, help="Report the L2 partial norms against it.")
@click.option("--windows", type=FLOATS, default=None)
@job("weights transform")
def transform(record, execution, weight, delta, p, grid, measure, windows):
    """Windowed minimum of W-tilde_p capped by e^{delta|x|/3}."""
    del execution
    report = weight_transform(weight.value, delta, p, grid, None if measure is None else measure.value, windows)
    record.summary = report.serialize()
    record.rows = [{"x": float(x), "W": float(w)} for x, w in zip(report.grid, report.values)]


@weights_bp.cli.command("bakan")
@click.option("--f", "function", type=FUNCTION, required=True)
@click.option("--f-at-i", type=COMPLEX, required=True, help="The value f(i).")
@click.option("--approximant", "approximants", type=FUNCTION, multiple=True,
              help="h_1, h_2, ... in order; repeat the option.")
@click.option("--n", type=float, default=1.0, show_default=True)
@click.option("--K", "K", type=int, default=None, help="Default: the number of approximants.")
@click.option("--s", "s_values", type=FLOATS, default="", help="Shifts at which to check the chain.")
@click.option("--grid", type=GRID, default=None)
@job("weights bakan")
def bakan(record, execution, function, f_at_i, approximants, n, K, s_values, grid):
    """Weight built from a sequence of approximants to f(x)/(x - i)."""
    del execution
    hs = [a.value for a in approximants]
    report = bakan_weight(function.value, hs, n, len(hs) if K is None else K, s_values, grid, f_at_i=f_at_i)
    record.summary = report.serialize()
    if grid is not None:
        record.rows = [{"x": float(x), "W": float(w)} for x, w in zip(grid, report.weight(grid))]
