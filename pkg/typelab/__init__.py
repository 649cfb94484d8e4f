"""typelab: numerical lab for the exponential type of measures, application factory."""
import logging
import os

import click
from dotenv import load_dotenv
from flask import Flask
from flask.cli import FlaskGroup

from typelab.constants import DEFAULTS

load_dotenv()


def create_app(test_config=None):
    """Create and configure the app that carries the command groups."""
    app = Flask(__name__)

    app.config.from_mapping(
        THREADS=int(os.environ.get("TYPELAB_THREADS", "1")),
        MODE=os.environ.get("TYPELAB_MODE", "strict"),
        OUTPUT_DIR=os.environ.get("TYPELAB_OUTPUT_DIR", "typelab-out"),
        DEFAULTS=DEFAULTS,
    )

    if test_config is not None:
        app.config.from_mapping(test_config)

    from typelab.commands import BLUEPRINTS  # pylint: disable=import-outside-toplevel
    for blueprint in BLUEPRINTS:
        app.register_blueprint(blueprint)

    return app


def _configure_logging(ctx, param, value):
    del ctx, param
    logging.basicConfig(level=logging.INFO if value else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


cli = FlaskGroup(
    name="typelab",
    help="Certificates and constructions for the exponential type of measures.",
    create_app=create_app,
    add_default_commands=False,
    add_version_option=False,
    set_debug_flag=False,
    params=[click.Option(["-v", "--verbose"], is_flag=True, expose_value=False, is_eager=True,
                         callback=_configure_logging, help="Log pipeline milestones.")],
)
