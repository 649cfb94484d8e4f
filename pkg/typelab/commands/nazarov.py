"""nazarov check | build | verify | stable"""
import click
import numpy as np

from typelab.commands import nazarov_bp
from typelab.commands.common import FLOATS, GRID, job
from typelab.converters import DIFFEO
from typelab.nazarov import (
    SchwartzWindow, build_measure, gamma_check, poisson_decay_test, stable_orthogonality_certificate,
)


@nazarov_bp.cli.command("check")
@click.option("--diffeo", type=DIFFEO, required=True)
@click.option("--grid", type=GRID, default="-1000:1000:20001", show_default=True)
@click.option("--k-max", type=int, default=None)
@job("nazarov check")
def check(record, execution, diffeo, grid, k_max):
    """Membership of X in the smooth distortion class."""
    del execution
    record.add_certificate(gamma_check(diffeo.value, grid, k_max))


@nazarov_bp.cli.command("build")
@click.option("--diffeo", type=DIFFEO, required=True)
@click.option("--c", type=float, default=1.0, show_default=True)
@click.option("--K", "K", type=int, required=True)
@job("nazarov build")
def build(record, execution, diffeo, c, K):
    """Write the measure with atoms X(ck) and masses X'(ck) to measure.json."""
    del execution
    mu = build_measure(diffeo.value, c, K)
    record.attachments["measure.json"] = mu.to_dict()
    record.summary = {"atoms": int(mu.positions.size), "radius": float(mu.truncation_radius),
                      "total_mass": float(np.sum(mu.masses))}


@nazarov_bp.cli.command("verify")
@click.option("--diffeo", type=DIFFEO, required=True)
@click.option("--c", type=float, default=1.0, show_default=True)
@click.option("--K", "K", type=int, required=True)
@click.option("--t-max", type=float, default=500.0, show_default=True)
@click.option("--points", type=int, default=481, show_default=True, help="Samples of t on [0, t-max].")
@click.option("--a", type=float, default=2.0, show_default=True, help="Inner radius of the window.")
@click.option("--b", type=float, default=5.0, show_default=True, help="Outer radius of the window.")
@job("nazarov verify")
def verify(record, execution, diffeo, c, K, t_max, points, a, b):
    """Decay of the smoothed Poisson defect D(t) of the rescaled lattice measure."""
    mu = build_measure(diffeo.value, c, K)
    report = poisson_decay_test(mu, SchwartzWindow(a, b), np.linspace(0.0, t_max, points), c,
                                execution=execution)
    record.add_certificate(report.certificate)
    record.rows = report.rows()


@nazarov_bp.cli.command("stable")
@click.option("--diffeo", type=DIFFEO, required=True)
@click.option("--c", type=float, default=1.0, show_default=True)
@click.option("--R-max", "R_max", type=float, default=10000.0, show_default=True)
@click.option("--A", "A_list", type=FLOATS, default="1,10,100", show_default=True)
@job("nazarov stable")
def stable(record, execution, diffeo, c, R_max, A_list):
    """Stable orthogonality of the distorted lattice."""
    del execution
    record.add_certificate(stable_orthogonality_certificate(diffeo.value, c, R_max, A_list))
