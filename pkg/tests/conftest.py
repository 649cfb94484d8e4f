"""
Pytest fixtures shared across all test modules.
"""
import json

import pytest

from typelab import create_app


@pytest.fixture(scope="session")
def app(tmp_path_factory):
    """Create an application instance configured for testing."""
    application = create_app(
        {
            "TESTING": True,
            "OUTPUT_DIR": str(tmp_path_factory.mktemp("typelab-out")),
            "MODE": "strict",
            "THREADS": 1,
        }
    )
    return application


@pytest.fixture(scope="function")
def runner(app):
    """Click runner bound to the app, so commands see ``current_app``."""
    return app.test_cli_runner()


@pytest.fixture(scope="function")
def out_dir(tmp_path):
    """A fresh output directory for one command run."""
    return tmp_path / "out"


# ---------------------------------------------------------------------------
# Input file helpers
# ---------------------------------------------------------------------------


def write_json(directory, name, payload):
    """Helper: write ``payload`` as ``directory/name`` and return the path as a string."""
    path = directory / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def make_measure(directory, name="measure.json", **payload):
    """Helper: a measure file; defaults to an empty measure."""
    return write_json(directory, name, payload)


def make_lattice(directory, count, step=1.0, mass=1.0, name="lattice.json"):
    """Helper: unit lattice ``{n * step : |n| <= count}`` with constant mass."""
    atoms = [[n * step, mass] for n in range(-count, count + 1)]
    return make_measure(directory, name, symmetric=True, real_atoms=atoms, lattice_tail=True)


def make_function(directory, name="f.json", **payload):
    """Helper: a function (or weight) file."""
    return write_json(directory, name, payload)


def make_potential(directory, name="potential.json", **payload):
    """Helper: a potential file; defaults to q = 0."""
    payload.setdefault("kind", "zero")
    return write_json(directory, name, payload)


def read_report(directory):
    """Helper: the report.json a command wrote."""
    with open(directory / "report.json", encoding="utf-8") as fh:
        return json.load(fh)
