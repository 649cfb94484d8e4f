"""
typelab - Commands Package

One blueprint per command group; ``certify`` and ``run`` sit at the top level.
"""
from flask import Blueprint

measure_bp = Blueprint("measure", __name__, cli_group="measure")
entire_bp = Blueprint("entire", __name__, cli_group="entire")
weights_bp = Blueprint("weights", __name__, cli_group="weights")
nazarov_bp = Blueprint("nazarov", __name__, cli_group="nazarov")
sharpness_bp = Blueprint("sharpness", __name__, cli_group="sharpness")
sl_bp = Blueprint("sl", __name__, cli_group="sl")
top_bp = Blueprint("typelab", __name__, cli_group=None)

BLUEPRINTS = (measure_bp, entire_bp, weights_bp, nazarov_bp, sharpness_bp, sl_bp, top_bp)

# Import command modules to register them with the blueprints.
from typelab.commands import (  # noqa: E402, F401
    measure,
    entire,
    weights,
    nazarov,
    sharpness,
    certify,
    sturm_liouville,
    jobs,
)
