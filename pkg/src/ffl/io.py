"""Instance files and solution reports (JSON).

Instance file::

    {"speed": 2.0, "points": [{"x": 0, "y": 0, "w": 1}, ...]}

``w`` may be omitted (defaults to 1).  Any other key is rejected.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .geometry import DemandPoint, FFLError, Instance, Shape
from .solver import Solution

_TOP_KEYS = {"speed", "points"}
_POINT_KEYS = {"x", "y", "w"}


class InstanceFormatError(FFLError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _number(value, field) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(field, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InstanceFormatError(field, "must be finite")
    return value


def instance_from_dict(data: Any) -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError("<root>", "expected an object with 'speed' and 'points'")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise InstanceFormatError(sorted(extra)[0], "unknown field")
    for key in ("speed", "points"):
        if key not in data:
            raise InstanceFormatError(key, "missing")
    v = _number(data["speed"], "speed")
    if not v > 1:
        raise InstanceFormatError("speed", f"must be greater than 1, got {v}")
    raw = data["points"]
    if not isinstance(raw, list):
        raise InstanceFormatError("points", "expected a list")
    if not raw:
        raise InstanceFormatError("points", "must contain at least one point")
    pts = []
    for i, rec in enumerate(raw):
        where = f"points[{i}]"
        if not isinstance(rec, dict):
            raise InstanceFormatError(where, "expected an object with x, y and w")
        extra = set(rec) - _POINT_KEYS
        if extra:
            raise InstanceFormatError(f"{where}.{sorted(extra)[0]}", "unknown field")
        for key in ("x", "y"):
            if key not in rec:
                raise InstanceFormatError(f"{where}.{key}", "missing")
        x = _number(rec["x"], f"{where}.x")
        y = _number(rec["y"], f"{where}.y")
        w = _number(rec.get("w", 1.0), f"{where}.w")
        if not w > 0:
            raise InstanceFormatError(f"{where}.w", f"weight must be positive, got {w}")
        pts.append(DemandPoint(x, y, w))
    return Instance(tuple(pts), v)


def instance_to_dict(instance: Instance) -> dict:
    return {
        "speed": instance.v,
        "points": [{"x": p.x, "y": p.y, "w": p.w} for p in instance.points],
    }


def parse_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError("<file>", f"not valid JSON ({e.msg} at line {e.lineno})") from None
    return instance_from_dict(data)


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def load_instance(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InstanceFormatError("<file>", f"cannot read {path}: {e.strerror}") from None
    return parse_instance(text)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance))


# --- reports ---------------------------------------------------------------------

def _pt(p):
    return None if p is None else {"x": float(p[0]), "y": float(p[1])}


def solution_report(solution: Solution, instance: Instance) -> dict:
    """Report with a fixed key order; coordinates are written at full precision."""
    a, b = solution.cover_segment
    theta = solution.angle
    per_point = []
    for p, shape, t in zip(instance.points, solution.assignments, solution.times):
        per_point.append({
            "x": p.x,
            "y": p.y,
            "w": p.w,
            "shape": shape.kind.value,
            "entry": _pt(shape.entry),
            "exit": _pt(shape.exit),
            "time": float(t),
            "weighted_time": float(p.w * t),
        })
    return {
        "objective": float(solution.objective),
        "facility": _pt(solution.facility),
        "highway": {
            "point_a": _pt(a),
            "point_b": _pt(b),
            "angle_radians": float(theta),
            "angle_degrees": math.degrees(theta),
        },
        "provenance": solution.provenance.value,
        "points": per_point,
        "solver": {
            "mode": solution.mode,
            "v": float(solution.v),
            "threshold_applied": bool(solution.threshold_applied),
            "wall_time": float(solution.wall_time),
        },
    }


def report_problems(report: dict, tol: float = 1e-9) -> list[str]:
    """Recompute the objective from the per-point records of a report."""
    problems = []
    fac = report["facility"]
    total = 0.0
    speed = report["solver"]["v"]
    for i, rec in enumerate(report["points"]):
        if rec["shape"] not in {s.value for s in Shape}:
            problems.append(f"points[{i}]: unknown shape {rec['shape']!r}")
            continue
        if rec["shape"] == "direct":
            t = abs(rec["x"] - fac["x"]) + abs(rec["y"] - fac["y"])
        else:
            e, q = rec["entry"], rec["exit"]
            t = (abs(rec["x"] - e["x"]) + abs(rec["y"] - e["y"])
                 + math.hypot(e["x"] - q["x"], e["y"] - q["y"]) / speed
                 + abs(q["x"] - fac["x"]) + abs(q["y"] - fac["y"]))
        scale = max(1.0, abs(t))
        if abs(t - rec["time"]) > tol * scale:
            problems.append(f"points[{i}]: time {rec['time']} does not match its path ({t})")
        if abs(rec["w"] * rec["time"] - rec["weighted_time"]) > tol * scale * rec["w"]:
            problems.append(f"points[{i}]: weighted_time inconsistent")
        total += rec["weighted_time"]
    if abs(total - report["objective"]) > tol * max(1.0, abs(total)):
        problems.append(f"objective {report['objective']} != sum of weighted times {total}")
    return problems
