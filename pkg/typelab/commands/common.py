"""Parameter types, shared options and the job wrapper every command runs through."""
import functools
import json
import logging
from fractions import Fraction

import click
import numpy as np
from flask import current_app

from typelab.artifacts import RunRecord
from typelab.certificate import Verdict, to_jsonable
from typelab.constants import EXIT_INCONCLUSIVE, EXIT_INTERNAL_ERROR, EXIT_VALIDATION_FAILURE, error_response
from typelab.converters import ZEROS, LoadedInput
from typelab.exceptions import TypelabError, ValidationError
from typelab.execution import MODES, Execution
from typelab.products import FACTORIES

logger = logging.getLogger(__name__)


class FloatList(click.ParamType):
    """Comma-separated numbers: ``1,10,100``."""

    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        try:
            return [float(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of numbers", param, ctx)


class ComplexNumber(click.ParamType):
    """A complex number written the Python way: ``10+1j``."""

    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, (int, float, complex)):
            return complex(value)
        try:
            return complex(str(value).replace(" ", ""))
        except ValueError:
            self.fail(f"{value!r} is not a complex number", param, ctx)


class Grid(click.ParamType):
    """Uniform grid ``lo:hi:points``."""

    name = "grid"

    def convert(self, value, param, ctx):
        if isinstance(value, np.ndarray):
            return value
        try:
            lo, hi, points = str(value).split(":")
            lo, hi, points = float(lo), float(hi), int(points)
        except ValueError:
            self.fail(f"{value!r} is not of the form lo:hi:points", param, ctx)
        if points < 2 or hi <= lo:
            self.fail("a grid needs hi > lo and at least two points", param, ctx)
        return np.linspace(lo, hi, points)


class Rational(click.ParamType):
    """An exact fraction such as ``1/10``."""

    name = "fraction"

    def convert(self, value, param, ctx):
        try:
            return Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a fraction", param, ctx)


FLOATS = FloatList()
COMPLEX = ComplexNumber()
GRID = Grid()
RATIONAL = Rational()


def product_options(func):
    """--family/--count or --zeros select the canonical product a command works on."""
    func = click.option("--zeros", type=ZEROS, default=None, help="Measure file holding the zero set.")(func)
    func = click.option("--count", type=int, default=100000, show_default=True,
                        help="Positive zeros of a built-in family.")(func)
    func = click.option("--family", type=click.Choice(sorted(FACTORIES)), default=None,
                        help="Built-in product family.")(func)
    return func


def resolve_product(family, count, zeros):
    if (family is None) == (zeros is None):
        raise ValidationError("give exactly one of --family and --zeros")
    if zeros is not None:
        return zeros.value
    return FACTORIES[family](count)


def _param_value(value):
    if isinstance(value, LoadedInput):
        return str(value.path)
    if isinstance(value, (list, tuple)):
        return [_param_value(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.ndarray) and value.size > 2:
        return {"lo": float(value[0]), "hi": float(value[-1]), "points": int(value.size)}
    return to_jsonable(value)


def _input_paths(params):
    paths = {}
    for name, value in params.items():
        if isinstance(value, LoadedInput):
            paths[name] = value.path
        elif isinstance(value, (list, tuple)):
            paths.update({f"{name}[{i}]": v.path for i, v in enumerate(value) if isinstance(v, LoadedInput)})
    return paths


def job(command_name):
    """Wrap a command body ``body(record, execution, **params)`` with output and exit handling.

    Adds --output-dir, --mode and --require-verdict. Library errors exit 2,
    anything else exits 1, and with --require-verdict a run whose certificates
    are all inconclusive exits 3.
    """

    def decorator(body):
        @click.option("--require-verdict", is_flag=True, help="Exit 3 when every certificate is inconclusive.")
        @click.option("--mode", type=click.Choice(MODES), default=None, help="Evaluation mode.")
        @click.option("--output-dir", type=click.Path(file_okay=False), default=None,
                      help="Directory for report.json, data.csv and run-log.json.")
        @functools.wraps(body)
        def wrapper(output_dir, mode, require_verdict, **params):
            ctx = click.get_current_context()
            config = current_app.config
            code = None
            try:
                execution = Execution(mode or config["MODE"], int(config["THREADS"]))
                record = RunRecord(
                    command=command_name,
                    params={k: _param_value(v) for k, v in sorted(params.items())},
                    mode=execution.mode,
                    threads=execution.threads,
                    inputs=_input_paths(params),
                )
                body(record, execution, **params)
                target = record.write(output_dir or config["OUTPUT_DIR"])
            except click.ClickException:
                raise
            except TypelabError as exc:
                logger.error("%s failed: %s", command_name, exc)
                code = error_response(str(exc), EXIT_VALIDATION_FAILURE)
            except Exception as exc:  # pylint: disable=broad-except
                logger.exception("%s failed with an internal error", command_name)
                code = error_response(f"internal error: {exc}", EXIT_INTERNAL_ERROR)
            if code is not None:
                ctx.exit(code)
            click.echo(json.dumps({"command": command_name, "output_dir": str(target),
                                   "verdicts": record.verdicts}))
            if require_verdict and record.certificates and all(
                    c.verdict is Verdict.INCONCLUSIVE for c in record.certificates):
                logger.warning("%s: every certificate is inconclusive", command_name)
                ctx.exit(EXIT_INCONCLUSIVE)

        return wrapper

    return decorator
