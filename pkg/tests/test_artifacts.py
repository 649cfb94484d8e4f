"""Tests for the output writer, certificate records, execution modes and input converters."""
import hashlib
import json
import math

import click
import numpy as np
import pytest

from typelab.artifacts import RunRecord, atomic_write, csv_text, dumps, sha256_file
from typelab.certificate import Certificate, Direction, Verdict, verdict_from_trend
from typelab.converters import FUNCTION, MANIFEST, MEASURE, POTENTIAL
from typelab.exceptions import ValidationError
from typelab.execution import Execution
from typelab.measures import SpectralMeasure
from typelab.trends import Trend
from tests.conftest import make_function, make_lattice, make_measure, write_json


def _certificate(verdict=Verdict.HOLDS):
    return Certificate("reference_type", "unit masses on Z", verdict, math.pi, Direction.EXACT,
                       params={"ell": 1.0}, evidence={"partials": [1.0, 2.0]}, flags=("checked",))


class TestDumps:
    """dumps / csv_text"""

    def test_sorted_strict_json(self):
        text = dumps({"b": math.inf, "a": np.float64(1.5), "c": [np.int64(2), -math.inf]})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"') < text.index('"c"')
        assert json.loads(text) == {"a": 1.5, "b": "inf", "c": [2, "-inf"]}

    def test_complex_and_nan(self):
        assert json.loads(dumps({"z": 1.0 - 2.0j, "v": math.nan})) == {"v": "nan", "z": {"re": 1.0, "im": -2.0}}

    def test_csv_union_of_keys(self):
        rows = [{"x": 1, "y": 2}, {"x": 3, "z": math.inf}]
        assert csv_text(rows) == "x,y,z\n1,2,\n3,,inf\n"


class TestAtomicWrite:
    """atomic_write / sha256_file"""

    def test_creates_parents_and_replaces(self, tmp_path):
        target = tmp_path / "deep" / "a.txt"
        atomic_write(target, "first")
        atomic_write(target, "second")
        assert target.read_text(encoding="utf-8") == "second"
        assert [p.name for p in target.parent.iterdir()] == ["a.txt"]

    def test_digest(self, tmp_path):
        target = tmp_path / "b.txt"
        atomic_write(target, "typelab")
        assert sha256_file(target) == hashlib.sha256(b"typelab").hexdigest()


class TestRunRecord:
    """RunRecord"""

    def test_write_lays_out_directory(self, tmp_path):
        source = make_lattice(tmp_path, 2)
        record = RunRecord(command="certify", params={"statement": "reference"}, inputs={"measure": source})
        record.add_certificate(_certificate())
        record.rows = [{"n": 1, "value": 0.5}]
        record.attachments["measure.json"] = {"real_atoms": [[0.0, 1.0]]}
        out = record.write(tmp_path / "out")
        assert sorted(p.name for p in out.iterdir()) == ["data.csv", "measure.json", "report.json",
                                                         "run-log.json"]
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert report["command"] == "certify"
        assert report["mode"] == "strict"
        assert report["certificates"][0]["value"] == math.pi
        assert "defaults" in report
        log = json.loads((out / "run-log.json").read_text(encoding="utf-8"))
        assert log["inputs"]["measure"]["sha256"] == sha256_file(source)
        assert log["started"] <= log["finished"]

    def test_no_rows_no_csv(self, tmp_path):
        record = RunRecord(command="sharpness lq1", params={})
        out = record.write(tmp_path / "out")
        assert not (out / "data.csv").exists()
        assert (out / "report.json").exists()

    def test_verdicts(self):
        record = RunRecord(command="certify", params={})
        record.add_certificate(_certificate())
        record.add_certificate(_certificate(Verdict.INCONCLUSIVE))
        assert record.verdicts == ["holds", "inconclusive"]


class TestCertificate:
    """Certificate"""

    def test_serialize_round_trip(self):
        cert = _certificate()
        payload = json.loads(dumps(cert.serialize()))
        assert payload["radius"] == "inf"
        assert payload["direction"] == "exact"
        assert Certificate.deserialize(payload) == cert

    def test_deserialize_needs_statement(self):
        with pytest.raises(ValidationError):
            Certificate.deserialize({"anchor": "x", "verdict": "holds"})

    def test_unknown_verdict(self):
        with pytest.raises(ValueError):
            Certificate("s", "a", "maybe")

    def test_verdict_from_trend(self):
        assert verdict_from_trend(Trend.CONVERGED) is Verdict.HOLDS
        assert verdict_from_trend(Trend.GROWING) is Verdict.FAILS
        assert verdict_from_trend(Trend.GROWING, holds_when=Trend.GROWING) is Verdict.HOLDS
        assert verdict_from_trend(Trend.INCONCLUSIVE) is Verdict.INCONCLUSIVE


class TestExecution:
    """Execution"""

    def test_invalid(self):
        with pytest.raises(ValidationError):
            Execution("lazy")
        with pytest.raises(ValidationError):
            Execution("parallel", 0)

    def test_strict_total_is_exact(self):
        assert Execution().total([1e16, 1.0, -1e16]) == 1.0

    def test_parallel_map_keeps_order(self):
        execution = Execution("parallel", 4)
        assert execution.map(lambda k: k * k, range(10)) == [k * k for k in range(10)]

    def test_map_chunks(self):
        values = Execution("parallel", 2).map_chunks(np.sqrt, np.arange(10.0), chunk=3)
        assert np.array_equal(values, np.sqrt(np.arange(10.0)))


class TestConverters:
    """Input file parameter types"""

    def test_measure(self, tmp_path):
        loaded = MEASURE.convert(make_lattice(tmp_path, 3), None, None)
        assert isinstance(loaded.value, SpectralMeasure)
        assert loaded.value.lattice_step() == 1.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(click.BadParameter, match="cannot read"):
            MEASURE.convert(str(tmp_path / "absent.json"), None, None)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(click.BadParameter, match="not valid JSON"):
            MEASURE.convert(str(path), None, None)

    def test_schema_violation(self, tmp_path):
        with pytest.raises(click.BadParameter):
            MEASURE.convert(make_measure(tmp_path, atoms=[[0.0, 1.0]]), None, None)
        with pytest.raises(click.BadParameter):
            POTENTIAL.convert(write_json(tmp_path, "q.json", {"kind": "constant"}), None, None)

    def test_library_error_becomes_bad_parameter(self, tmp_path):
        with pytest.raises(click.BadParameter):
            FUNCTION.convert(make_function(tmp_path, kind="gaussian"), None, None)

    def test_manifest_paths_are_relative_to_manifest(self, tmp_path):
        (tmp_path / "jobs").mkdir()
        make_lattice(tmp_path / "jobs", 2)
        path = write_json(tmp_path / "jobs", "job.json",
                          {"command": "certify", "inputs": {"measure": "lattice.json"}})
        loaded = MANIFEST.convert(path, None, None)
        assert loaded.value["inputs"]["measure"] == str(tmp_path / "jobs" / "lattice.json")

    def test_manifest_missing_input(self, tmp_path):
        path = write_json(tmp_path, "job.json", {"command": "certify", "inputs": {"measure": "absent.json"}})
        with pytest.raises(click.BadParameter, match="do not exist"):
            MANIFEST.convert(path, None, None)
