"""Run manifests, deterministic JSON output and baseline comparison."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

from . import __version__


class SchemaMismatch(ValueError):
    pass


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict[str, str] = field(default_factory=dict)
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    tool_version: str = __version__
    seed: int | None = None

    def to_json_obj(self) -> dict:
        return asdict(self)


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_json(path, obj: Any) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def read_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)


@dataclass
class Diff:
    exact_mismatches: list[tuple[str, Any, Any]] = field(default_factory=list)
    float_mismatches: list[tuple[str, float, float]] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.exact_mismatches or self.float_mismatches or self.missing)

    def to_json_obj(self) -> dict:
        return {
            "ok": self.ok,
            "exact_mismatches": [{"path": p, "report": a, "baseline": b} for p, a, b in self.exact_mismatches],
            "float_mismatches": [{"path": p, "report": a, "baseline": b} for p, a, b in self.float_mismatches],
            "missing": self.missing,
        }


def _walk(a, b, path: str, diff: Diff, rel_tol: float, abs_tol: float) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            sub = f"{path}.{k}" if path else str(k)
            if k not in a or k not in b:
                diff.missing.append(sub)
            else:
                _walk(a[k], b[k], sub, diff, rel_tol, abs_tol)
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            diff.exact_mismatches.append((f"{path}.length", len(a), len(b)))
            return
        for k, (x, y) in enumerate(zip(a, b)):
            _walk(x, y, f"{path}[{k}]", diff, rel_tol, abs_tol)
    elif isinstance(a, float) or isinstance(b, float):
        if isinstance(a, bool) or isinstance(b, bool) or a is None or b is None:
            diff.exact_mismatches.append((path, a, b))
        elif not math.isclose(float(a), float(b), rel_tol=rel_tol, abs_tol=abs_tol):
            diff.float_mismatches.append((path, a, b))
    elif a != b or type(a) is not type(b):
        diff.exact_mismatches.append((path, a, b))


def compare_baseline(report: dict, baseline: dict, rel_tol: float = 1e-9, abs_tol: float = 0.0,
                     ignore=("manifest",)) -> Diff:
    """Integers, strings and booleans must match exactly; floats within
    ``rel_tol``.  Top-level keys in ``ignore`` are skipped."""
    if report.get("schema") != baseline.get("schema"):
        raise SchemaMismatch(f"schema {report.get('schema')} vs baseline {baseline.get('schema')}")
    a = {k: v for k, v in report.items() if k not in ignore}
    b = {k: v for k, v in baseline.items() if k not in ignore}
    diff = Diff()
    _walk(a, b, "", diff, rel_tol, abs_tol)
    return diff
