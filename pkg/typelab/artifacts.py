"""Output directory writer: report.json, data.csv and run-log.json, each written atomically."""
import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from typelab.certificate import to_jsonable
from typelab.constants import DEFAULTS, VERSION

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"
DATA_NAME = "data.csv"
RUN_LOG_NAME = "run-log.json"


def atomic_write(path, text):
    """Write text to path through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def dumps(payload):
    """Canonical strict JSON: sorted keys, non-finite floats as strings."""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def csv_text(rows):
    """Rows of dicts as CSV with the union of their keys, in first-seen order."""
    fieldnames = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: to_jsonable(row.get(k, "")) for k in fieldnames})
    return buffer.getvalue()


@dataclass
class RunRecord:
    """Everything one command produces; ``write`` lays it out in the output directory."""

    command: str
    params: dict
    mode: str = "strict"
    threads: int = 1
    inputs: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    attachments: dict = field(default_factory=dict)
    started: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def add_certificate(self, certificate):
        self.certificates.append(certificate)
        return certificate

    @property
    def verdicts(self):
        return [c.verdict.value for c in self.certificates]

    def report(self):
        return {
            "command": self.command,
            "params": self.params,
            "mode": self.mode,
            "defaults": DEFAULTS,
            "certificates": [c.serialize() for c in self.certificates],
            "summary": self.summary,
        }

    def run_log(self):
        return {
            "version": VERSION,
            "command": self.command,
            "mode": self.mode,
            "threads": self.threads,
            "inputs": {name: {"path": str(path), "sha256": sha256_file(path)}
                       for name, path in sorted(self.inputs.items())},
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
        }

    def write(self, output_dir):
        output_dir = Path(output_dir)
        atomic_write(output_dir / REPORT_NAME, dumps(self.report()))
        if self.rows:
            atomic_write(output_dir / DATA_NAME, csv_text(self.rows))
        for name, payload in sorted(self.attachments.items()):
            atomic_write(output_dir / name, dumps(payload))
        atomic_write(output_dir / RUN_LOG_NAME, dumps(self.run_log()))
        logger.info("%s: wrote %d certificate(s) and %d row(s) to %s", self.command,
                    len(self.certificates), len(self.rows), output_dir)
        return output_dir
