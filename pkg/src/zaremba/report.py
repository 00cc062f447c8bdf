"""Experiment reports and their JSON/CSV serializations."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

from .errors import InvalidInput

FORMATS = ("json", "csv")
CSV_FIELDS = ("kind", "name", "value", "lhs", "rhs", "slack", "tolerance", "verdict", "anchor")


@dataclass
class Verdict:
    name: str
    anchor: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    @classmethod
    def from_inequality(cls, rep, name=None):
        """Collapse an inequality report onto its tightest sample."""
        worst = None
        for s in rep.samples:
            margin = rep._tol(s) - abs(s.slack) if rep.equality else s.slack + rep._tol(s)
            if worst is None or margin < worst[0]:
                worst = (margin, s)
        if worst is None:
            return cls(name or rep.name, rep.anchor, math.nan, math.nan, math.nan, rep.tolerance, rep.passed)
        s = worst[1]
        detail = {"samples": len(rep.samples), "min_slack": rep.min_slack}
        if s.label:
            detail["tightest"] = s.label
        return cls(name or rep.name, rep.anchor, s.lhs, s.rhs, s.slack, rep._tol(s), rep.passed, detail)

    @classmethod
    def upper(cls, name, anchor, lhs, rhs, tolerance=0.0, relative=True):
        """``lhs <= rhs`` with ``tolerance`` relative to ``|rhs|`` (or absolute)."""
        tol = tolerance * abs(rhs) if relative else tolerance
        slack = rhs - lhs
        return cls(name, anchor, float(lhs), float(rhs), float(slack), float(tol), bool(slack >= -tol))

    @classmethod
    def within(cls, name, anchor, value, lo, hi):
        slack = min(value - lo, hi - value)
        return cls(name, anchor, float(value), float(0.5 * (lo + hi)), float(slack), 0.0, bool(lo <= value <= hi),
                   {"interval": [float(lo), float(hi)]})


@dataclass
class Report:
    kind: str
    inputs: dict
    seed: int | None
    config_hash: str
    scalars: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    runtime: float = math.nan
    versions: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add(self, verdict: Verdict):
        self.verdicts.append(verdict)
        return verdict

    def to_dict(self, include_runtime=False) -> dict:
        out = {
            "kind": self.kind,
            "inputs": _plain(self.inputs),
            "seed": self.seed,
            "config_hash": self.config_hash,
            "scalars": _plain(self.scalars),
            "verdicts": [_plain(v.__dict__) for v in self.verdicts],
            "passed": self.passed,
            "versions": self.versions,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return out


def versions() -> dict:
    out = {"numpy": np.__version__}
    import scipy

    out["scipy"] = scipy.__version__
    try:
        out["artifact"] = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        out["artifact"] = "unknown"
    return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def _num(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return json.dumps(_plain(x), sort_keys=True)


def emit_report(report: Report, fmt="json", include_runtime=False) -> str:
    """Serialize ``report``; identical reports give identical text."""
    fmt = fmt.lower()
    if fmt == "json":
        return json.dumps(report.to_dict(include_runtime), sort_keys=True, indent=2) + "\n"
    if fmt != "csv":
        raise InvalidInput(f"format must be one of {FORMATS}, got {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for name in sorted(report.scalars):
        w.writerow(["scalar", name, _num(report.scalars[name]), "", "", "", "", "", ""])
    for v in report.verdicts:
        w.writerow(["verdict", v.name, "", _num(v.lhs), _num(v.rhs), _num(v.slack), _num(v.tolerance),
                    "pass" if v.passed else "fail", v.anchor])
    return buf.getvalue()


def write_report(report: Report, path, fmt="json", include_runtime=False):
    text = emit_report(report, fmt, include_runtime)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
