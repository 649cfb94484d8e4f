"""Click parameter types that turn input file paths into validated library objects."""
import json
from dataclasses import dataclass
from pathlib import Path

import click
from jsonschema import FormatChecker, ValidationError, validate

from typelab.constants import (
    DIFFEO_SCHEMA, FUNCTION_SCHEMA, MANIFEST_SCHEMA, MEASURE_SCHEMA, POTENTIAL_SCHEMA,
)
from typelab.exceptions import TypelabError


@dataclass(frozen=True)
class LoadedInput:
    """A parsed input file: where it came from, its raw JSON and the object built from it."""

    path: Path
    data: dict
    value: object


class _JsonFileType(click.ParamType):
    """Base type: path -> JSON -> schema check -> ``build``."""

    name = "file"
    schema = None

    def build(self, data):
        return data

    def convert(self, value, param, ctx):
        if isinstance(value, LoadedInput):
            return value
        path = Path(value)
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            self.fail(f"cannot read {path}: {exc.strerror}", param, ctx)
        except json.JSONDecodeError as exc:
            self.fail(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})", param, ctx)
        try:
            validate(data, self.schema, format_checker=FormatChecker())
        except ValidationError as exc:
            self.fail(f"{path}: {exc.message}", param, ctx)
        try:
            return LoadedInput(path, data, self.build(data))
        except TypelabError as exc:
            self.fail(f"{path}: {exc}", param, ctx)


class MeasureFile(_JsonFileType):
    """Converts a measure file to a SpectralMeasure."""

    name = "measure"
    schema = MEASURE_SCHEMA

    def build(self, data):
        from typelab.models import SpectralMeasure  # pylint: disable=import-outside-toplevel
        return SpectralMeasure.from_dict(data)


class ZeroSetFile(_JsonFileType):
    """Converts a measure file whose real atoms are the zeros of a canonical product."""

    name = "zeros"
    schema = MEASURE_SCHEMA

    def build(self, data):
        from typelab.models import CanonicalProduct  # pylint: disable=import-outside-toplevel
        return CanonicalProduct.from_dict(data)


class DiffeoFile(_JsonFileType):
    """Converts a diffeomorphism file to a GammaDiffeo."""

    name = "diffeo"
    schema = DIFFEO_SCHEMA

    def build(self, data):
        from typelab.models import GammaDiffeo  # pylint: disable=import-outside-toplevel
        return GammaDiffeo.from_dict(data)


class PotentialFile(_JsonFileType):
    """Converts a potential file to an SLProblem."""

    name = "potential"
    schema = POTENTIAL_SCHEMA

    def build(self, data):
        from typelab.sturm_liouville import potential_from_dict  # pylint: disable=import-outside-toplevel
        return potential_from_dict(data)


class FunctionFile(_JsonFileType):
    """Converts a function file to a TrialFunction."""

    name = "function"
    schema = FUNCTION_SCHEMA

    def build(self, data):
        from typelab.functions import trial_function_from_dict  # pylint: disable=import-outside-toplevel
        return trial_function_from_dict(data)


class WeightFile(_JsonFileType):
    """Converts a function file to a Weight."""

    name = "weight"
    schema = FUNCTION_SCHEMA

    def build(self, data):
        from typelab.weights import weight_from_dict  # pylint: disable=import-outside-toplevel
        return weight_from_dict(data)


class ManifestFile(_JsonFileType):
    """Loads a job manifest; input paths are resolved against the manifest's directory."""

    name = "manifest"
    schema = MANIFEST_SCHEMA

    def convert(self, value, param, ctx):
        loaded = super().convert(value, param, ctx)
        base = loaded.path.parent
        inputs = {name: str(base / p) for name, p in loaded.data.get("inputs", {}).items()}
        missing = sorted(p for p in inputs.values() if not Path(p).is_file())
        if missing:
            self.fail(f"{loaded.path}: referenced files do not exist: {missing}", param, ctx)
        return LoadedInput(loaded.path, loaded.data, {**loaded.data, "inputs": inputs})


MEASURE = MeasureFile()
ZEROS = ZeroSetFile()
DIFFEO = DiffeoFile()
POTENTIAL = PotentialFile()
FUNCTION = FunctionFile()
WEIGHT = WeightFile()
MANIFEST = ManifestFile()
