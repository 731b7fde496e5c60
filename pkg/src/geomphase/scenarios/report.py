"""Run reports and their CSV / JSON serializations."""

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

CSV_HEADER = (
    "scenario",
    "kind",
    "level",
    "samples",
    "steps",
    "sweep_time",
    "measured_phase",
    "predicted_phase",
    "deviation",
    "fidelity",
    "notes",
)


@dataclass(frozen=True)
class Row:
    """One result line.

    ``deviation`` is |measured_phase - predicted_phase| and is present only
    when both are; ``predicted_phase`` is already placed on the branch of
    ``measured_phase``.  ``flagged`` rows carry the error name in ``notes``.
    """

    scenario: str
    kind: str
    level: str
    samples: Optional[int] = None
    steps: Optional[int] = None
    sweep_time: Optional[float] = None
    measured_phase: Optional[float] = None
    predicted_phase: Optional[float] = None
    deviation: Optional[float] = None
    fidelity: Optional[float] = None
    notes: str = ""
    flagged: bool = False
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class RunReport:
    scenario: dict
    rows: tuple
    checks: tuple = ()
    provenance: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.passed for c in self.checks) and not any(r.flagged for r in self.rows)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        w.writerow([_cell(getattr(r, k)) for k in CSV_HEADER])
    return buf.getvalue()


def to_json(report):
    doc = {
        "scenario": report.scenario,
        "rows": [asdict(r) for r in report.rows],
        "checks": [asdict(c) for c in report.checks],
        "provenance": report.provenance,
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def from_json(text):
    doc = json.loads(text)
    row_keys = {f.name for f in fields(Row)}
    rows = tuple(Row(**{k: v for k, v in r.items() if k in row_keys}) for r in doc["rows"])
    checks = tuple(Check(**c) for c in doc.get("checks", []))
    return RunReport(doc["scenario"], rows, checks, doc.get("provenance", {}))


def render(report, fmt):
    if fmt == "csv":
        return to_csv(report)
    if fmt == "json":
        return to_json(report)
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report, fmt, path=None):
    """Serialize ``report``; write it to ``path`` when given, and return the text.

    Unwritable paths raise OSError with the path in the message.
    """
    text = render(report, fmt)
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text
