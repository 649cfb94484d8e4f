"""run MANIFEST: replay one command from a job manifest."""
import logging

import click

from typelab.commands import top_bp
from typelab.converters import MANIFEST
from typelab.exceptions import ValidationError

logger = logging.getLogger(__name__)


def _resolve_command(ctx, name):
    root = ctx.find_root()
    command = root.command
    for part in name.split():
        if not isinstance(command, click.Group):
            raise ValidationError(f"{name!r} names no command")
        command = command.get_command(root, part)
        if command is None:
            raise ValidationError(f"{name!r} names no command")
    if isinstance(command, click.Group) or name.split()[0] == "run":
        raise ValidationError(f"{name!r} is not a runnable command")
    return command


def _option(command, key):
    """The option a manifest key refers to, by parameter name or by flag."""
    key = key.split("[")[0]
    for param in command.params:
        if not isinstance(param, click.Option):
            continue
        if param.name == key or any(opt.lstrip("-").replace("-", "_") == key for opt in param.opts):
            return param
    raise ValidationError(f"{command.name} has no option {key!r}")


def _text(value):
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)


def _arguments(command, manifest):
    argv = []
    for key, path in manifest.get("inputs", {}).items():
        argv += [_option(command, key).opts[0], path]
    for key, value in manifest.get("params", {}).items():
        option = _option(command, key)
        flag = option.opts[0]
        if option.is_flag:
            if value:
                argv.append(flag)
        elif option.multiple:
            for item in value if isinstance(value, list) else [value]:
                argv += [flag, _text(item)]
        elif isinstance(value, list):
            argv += [flag, ",".join(_text(v) for v in value)]
        elif value is not None:
            argv += [flag, _text(value)]
    if "output_dir" in manifest:
        argv += ["--output-dir", manifest["output_dir"]]
    if "mode" in manifest:
        argv += ["--mode", manifest["mode"]]
    if manifest.get("require_verdict"):
        argv.append("--require-verdict")
    return argv


@top_bp.cli.command("run")
@click.argument("manifest", type=MANIFEST)
@click.pass_context
def run(ctx, manifest):
    """Run the command a job manifest names, with its inputs and parameters."""
    data = manifest.value
    try:
        command = _resolve_command(ctx, data["command"])
        argv = _arguments(command, data)
    except ValidationError as exc:
        raise click.BadParameter(f"{manifest.path}: {exc}", ctx=ctx, param_hint="MANIFEST") from exc
    if data.get("seed") is not None:
        logger.info("manifest seed %s: no command draws random numbers", data["seed"])
    logger.info("running %s from %s", data["command"], manifest.path)
    with command.make_context(f"typelab {data['command']}", argv, parent=ctx) as sub_ctx:
        command.invoke(sub_ctx)
