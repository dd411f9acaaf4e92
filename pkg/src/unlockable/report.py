"""Report documents and their text / JSON renderings.

JSON layout (``schema`` ``"1"``)::

    {
      "schema": "1",
      "version": "<package version>",
      "command": {"name": ..., <flags>},
      "checks": [
        {"name": str, "source": str, "passed": bool,
         "tolerance": float | null, "values": {str: json value}}
      ],
      "verdict": "pass" | "fail"
    }

Floats are written with ``repr`` precision, so every double round-trips.
Keys are sorted, so equal documents serialize to identical bytes.
"""

from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field
from typing import Any, TextIO

SCHEMA_VERSION = "1"

# claim sources
STATED = "stated-claim"
DERIVED = "derived-finding"
CONSISTENCY = "consistency"
DEMO = "demo"


@dataclass
class CheckRecord:
    name: str
    source: str
    passed: bool
    tolerance: float | None = None
    values: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "source": self.source, "passed": bool(self.passed),
                "tolerance": self.tolerance, "values": _jsonable(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "CheckRecord":
        return cls(d["name"], d["source"], d["passed"], d["tolerance"], dict(d["values"]))


@dataclass
class ReportDocument:
    version: str
    command: dict[str, Any]
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"schema": SCHEMA_VERSION, "version": self.version,
                "command": _jsonable(self.command),
                "checks": [c.to_dict() for c in self.checks],
                "verdict": self.verdict}

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        if d.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["version"], dict(d["command"]), [CheckRecord.from_dict(c) for c in d["checks"]])


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, numbers.Integral):
        return int(v)
    if isinstance(v, numbers.Real):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return str(v)


def to_json(doc: ReportDocument) -> str:
    return json.dumps(doc.to_dict(), sort_keys=True, indent=2) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def to_text(doc: ReportDocument) -> str:
    head = [f"unlockable {doc.version}",
            "command: " + " ".join(f"{k}={_fmt(v)}" for k, v in doc.command.items())]
    rows = [("STATUS", "CHECK", "SOURCE", "TOL", "VALUES")]
    for c in doc.checks:
        tol = "-" if c.tolerance is None else f"{c.tolerance:g}"
        vals = "; ".join(f"{k}={_fmt(v)}" for k, v in c.values.items())
        rows.append(("PASS" if c.passed else "FAIL", c.name, c.source, tol, vals))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    body = ["  ".join(r[i].ljust(widths[i]) for i in range(4)) + "  " + r[4] for r in rows]
    body = [line.rstrip() for line in body]
    n_fail = sum(not c.passed for c in doc.checks)
    tail = [f"checks: {len(doc.checks)}  failed: {n_fail}", f"verdict: {doc.verdict.upper()}"]
    return "\n".join(head + [""] + body + [""] + tail) + "\n"


def emit_report(doc: ReportDocument, fmt: str, destination: TextIO) -> None:
    if fmt == "json":
        destination.write(to_json(doc))
    elif fmt == "text":
        destination.write(to_text(doc))
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    destination.flush()
