"""Exit codes, JSON schemas for every input file kind, defaults, and the error helper."""
import json
from pathlib import Path

import click

VERSION = "1.0.0"

EXIT_OK = 0
EXIT_INTERNAL_ERROR = 1
EXIT_VALIDATION_FAILURE = 2
EXIT_INCONCLUSIVE = 3

with open(Path(__file__).with_name("defaults.json"), encoding="utf-8") as _fh:
    DEFAULTS = json.load(_fh)

_PAIR_LIST = {
    "type": "array",
    "items": {
        "type": "array",
        "items": {"type": "number"},
        "minItems": 2,
        "maxItems": 2,
    },
}

MEASURE_SCHEMA = {
    "type": "object",
    "properties": {
        "symmetric": {"type": "boolean"},
        "real_atoms": _PAIR_LIST,
        "real_density": {
            "type": ["object", "null"],
            "properties": {
                "grid": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                "values": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "tail": {"type": "string", "enum": ["none", "constant"]},
            },
            "required": ["grid", "values"],
            "additionalProperties": False,
        },
        "imag_atoms": _PAIR_LIST,
        "truncation_radius": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "lattice_tail": {"type": "boolean"},
        "metadata": {"type": "object"},
    },
    "additionalProperties": False,
}

DIFFEO_SCHEMA = {
    "type": "object",
    "properties": {
        "family": {"type": "string", "enum": ["identity", "arctan_shift", "arcsinh_shift", "linear"]},
        "beta": {"type": "number"},
    },
    "required": ["family"],
    "additionalProperties": False,
}

POTENTIAL_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"type": "string", "enum": ["zero", "constant", "sampled"]},
        "value": {"type": "number"},
        "grid": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "a": {"type": ["number", "string"]},
        "h": {"type": "number"},
    },
    "required": ["kind"],
    "additionalProperties": False,
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "constant"}}},
            "then": {"required": ["value"]},
        },
        {
            "if": {"properties": {"kind": {"const": "sampled"}}},
            "then": {"required": ["grid", "values"]},
        },
    ],
}

FUNCTION_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {
            "type": "string",
            "enum": [
                "zero", "constant", "power", "exp_abs", "sinc_power", "bump",
                "lattice_indicator", "gaussian", "sampled",
            ],
        },
        "value": {"type": "number"},
        "exponent": {"type": "number"},
        "rate": {"type": "number"},
        "b": {"type": "number", "exclusiveMinimum": 0},
        "power": {"type": "integer", "minimum": 1},
        "shift": {"type": "number"},
        "lo": {"type": "number"},
        "hi": {"type": "number"},
        "even": {"type": "boolean"},
        "step": {"type": "number", "exclusiveMinimum": 0},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "infinity_outside": {"type": "boolean"},
        "grid": {"type": "array", "items": {"type": "number"}},
        "values": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

MANIFEST_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"type": "string", "minLength": 1},
        "inputs": {"type": "object", "additionalProperties": {"type": "string"}},
        "params": {"type": "object"},
        "output_dir": {"type": "string"},
        "mode": {"type": "string", "enum": ["strict", "parallel"]},
        "seed": {"type": ["integer", "null"]},
        "require_verdict": {"type": "boolean"},
    },
    "required": ["command"],
    "additionalProperties": False,
}


def error_response(message, exit_code):
    """Print a JSON error object on stderr and return the exit code to use."""
    click.echo(json.dumps({"error": message}), err=True)
    return exit_code
