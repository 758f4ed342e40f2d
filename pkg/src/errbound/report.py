"""Check reports shared by the solver and certificate suites, plus JSON output.

JSON is written by a small custom encoder because every real must carry at
least 17 significant digits (``%.16e``), which ``json.dumps`` does not offer.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Violation:
    check: str
    lhs: float
    rhs: float
    index: int = -1
    point: object = None

    def to_dict(self):
        d = {"check": self.check, "lhs": float(self.lhs), "rhs": float(self.rhs)}
        if self.index >= 0:
            d["index"] = int(self.index)
        if self.point is not None:
            d["point"] = np.asarray(self.point, dtype=float).tolist()
        return d


@dataclass
class Report:
    """Outcome of one inequality family evaluated over many points.

    ``worst`` is the check's headline number (largest ratio, smallest gap,
    ...) and ``bound`` the value it is compared against.
    """

    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    worst: float = float("nan")
    bound: float = float("nan")
    flags: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.violations

    def add(self, lhs, rhs, index=-1, point=None, check=None):
        self.violations.append(Violation(check or self.name, lhs, rhs, index, point))

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "worst": self.worst,
            "bound": self.bound,
            "flags": dict(self.flags),
            "violations": [v.to_dict() for v in self.violations],
        }

    def __str__(self):
        status = "PASS" if self.passed else f"FAIL ({len(self.violations)} violations)"
        return (f"{self.name}: {status}; checked={self.checked} "
                f"worst={self.worst:.6g} bound={self.bound:.6g}")


def _fmt_float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.16e" % x


def dumps(obj, indent=2, _level=0):
    """JSON text with reals at 17 significant digits; non-finite as strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


def to_float(v):
    """Inverse of ``dumps`` for scalars (``"inf"`` and friends included)."""
    return float(v)
