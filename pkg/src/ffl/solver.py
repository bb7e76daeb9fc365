"""Exact O(n^3 log n) search for the optimal facility and highway.

An optimal solution either has the highway through a demand point with the
facility on a grid line (Case A) or the facility on a grid vertex (Case B).
Each candidate family is a one-parameter sweep over the canonical angle; the
four canonical frames cover every orientation.  Case B is only needed when
``v <= 3*sqrt(2)/4``.
"""

from __future__ import annotations

import enum
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .geometry import (
    EPS,
    QUARTER_PI,
    DemandPoint,
    EmptyInstanceError,
    FFLError,
    Frame,
    HighwayLine,
    Instance,
    PathShape,
    Point,
    Shape,
    minimal_cover_segment,
    phi_v,
    tolerance,
    travel_time,
)
from .objective import THRESHOLD_SPEED, CaseA, CaseB, Constraint, GridLine

GATE_EPS = 1e-12
CHUNK_ROWS = 256  # fixed so that results do not depend on the thread count

FRAMES = (Frame.IDENTITY, Frame.SWAP, Frame.REFLECT_X, Frame.REFLECT_X_SWAP)


class Provenance(enum.Enum):
    CASE_A = "case-a"
    CASE_B = "case-b"


MODES = {"auto": "auto", "full": "full", "case-a": "case-a-only", "case-a-only": "case-a-only"}


@dataclass(frozen=True)
class Grid:
    xs: tuple[float, ...]
    ys: tuple[float, ...]

    @property
    def vertices(self):
        return [(x, y) for x in self.xs for y in self.ys]


def build_grid(points: Sequence) -> Grid:
    pts = [_xy(p) for p in points]
    if not pts:
        raise EmptyInstanceError("instance has no demand points")
    return Grid(tuple(sorted({x for x, _ in pts})), tuple(sorted({y for _, y in pts})))


@dataclass(frozen=True)
class EventList:
    angles: tuple[float, ...]

    def intervals(self):
        return list(zip(self.angles[:-1], self.angles[1:]))


def _xy(p) -> Point:
    if isinstance(p, DemandPoint):
        return p.x, p.y
    return float(p[0]), float(p[1])


def _merge_events(ts, lo, hi, extra=()) -> EventList:
    angles = sorted([lo, hi, *extra, *(math.atan(t) for t in ts)])
    out = [angles[0]]
    for a in angles[1:]:
        if a - out[-1] > EPS:
            out.append(a)
    if hi - out[-1] <= EPS:
        out[-1] = hi
    return EventList(tuple(out))


def _constraint_event_ts(points, params, tl, th):
    buf = np.empty(3)
    ts = []
    for p in points:
        x, y = _xy(p)
        k = _kernels.point_events(x, y, *params, tl, th, buf)
        ts.extend(buf[:k].tolist())
    return ts


def case_a_events(anchor, line: GridLine, points, grid: Grid, v: float) -> EventList:
    """Angles in ``[0, pi/4]`` where the objective along this Case A sweep changes formula."""
    params = CaseA(_xy(anchor), line).params()
    ax, ay = _xy(anchor)
    ts = []
    # the grid lines themselves (coincide with point events, but the grid may carry more)
    if line.vertical and line.value != ax:
        ts += [(Y - ay) / (line.value - ax) for Y in grid.ys]
    elif not line.vertical and line.value != ay:
        ts += [(line.value - ay) / (X - ax) for X in grid.xs if X != ax]
    ts = [t for t in ts if 0 < t < 1]
    ts += _constraint_event_ts(points, params, 0.0, 1.0)
    phi = phi_v(v)
    return _merge_events(ts, 0.0, QUARTER_PI, (phi,) if 0 < phi < QUARTER_PI else ())


def case_b_events(u, points, v: float) -> EventList:
    """Angles in ``[phi_v, pi/4]`` where a line through ``u`` crosses a demand point."""
    phi = phi_v(v)
    params = CaseB(_xy(u)).params()
    ts = _constraint_event_ts(points, params, math.tan(phi), 1.0)
    return _merge_events(ts, phi, QUARTER_PI)


# --- solution ------------------------------------------------------------------

@dataclass
class Solution:
    facility: Point
    highway: HighwayLine           # canonical line; ``highway.frame`` maps it back
    objective: float
    assignments: list[PathShape]   # input-frame entry/exit points
    times: list[float]
    provenance: Provenance
    mode: str
    v: float
    constraint: Optional[Constraint] = None  # in canonical coordinates
    threshold_applied: bool = False
    wall_time: float = 0.0
    cover_segment: tuple[Point, Point] = field(default=((0.0, 0.0), (0.0, 0.0)))

    @property
    def frame(self) -> Frame:
        return self.highway.frame

    @property
    def angle(self) -> float:
        """Highway orientation in the input frame, in ``[0, pi)``."""
        return self.highway.input_angle()

    def shapes(self) -> list[Shape]:
        return [a.kind for a in self.assignments]


def _thread_count(threads: Optional[int]) -> int:
    if threads is None:
        raw = os.environ.get("FFL_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise FFLError(f"FFL_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise FFLError(f"thread count must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


class _Best:
    """Running minimum with the tolerance-aware tie-break used by the kernels."""

    def __init__(self):
        self.value = math.inf
        self.floor = math.inf
        self.key = None
        self.payload = None

    def offer(self, value, key, payload):
        if not math.isfinite(value):
            return
        self.floor = min(self.floor, value)
        tol = EPS * max(1.0, abs(self.floor))
        if value > self.floor + tol:
            return
        if self.key is None or self.value > self.floor + tol or key < self.key:
            self.value, self.key, self.payload = value, key, payload


def _rows_case_a(cx, cy):
    xs = np.unique(cx)
    ys = np.unique(cy)
    anchors = np.unique(np.stack([cx, cy], axis=1), axis=0)
    rows = []
    for ax, ay in anchors:
        for X in xs:
            rows.append((ax, ay, X, ay, 0.0, X - ax))
        for Y in ys:
            if Y != ay:  # the line through the anchor repeats x = ax
                rows.append((ax, ay, ax, Y, Y - ay, 0.0))
    return np.asarray(rows, dtype=float).reshape(-1, 6)


def _rows_case_b(cx, cy):
    xs = np.unique(cx)
    ys = np.unique(cy)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    gx, gy = gx.ravel(), gy.ravel()
    z = np.zeros_like(gx)
    return np.stack([gx, gy, gx, gy, z, z], axis=1)


def _sweep_family(instance: Instance, case: Provenance, threads: int, prune: bool):
    """Best candidate of one family over all frames as ``(value, key, payload)``."""
    xs, ys, ws = instance.arrays()
    v = instance.v
    t_phi = math.tan(phi_v(v))
    jobs = []
    for frame in FRAMES:
        cx, cy = frame.apply(xs, ys)
        cx = np.ascontiguousarray(cx, dtype=float) + 0.0  # drop negative zeros
        cy = np.ascontiguousarray(cy, dtype=float) + 0.0
        if case is Provenance.CASE_A:
            rows = _rows_case_a(cx, cy)
            t0 = 0.0
        else:
            rows = _rows_case_b(cx, cy)
            t0 = t_phi
        t_lo = np.full(rows.shape[0], t0)
        for start in range(0, rows.shape[0], CHUNK_ROWS):
            sl = slice(start, start + CHUNK_ROWS)
            jobs.append((frame, cx, cy, np.ascontiguousarray(rows[sl]), t_lo[sl]))

    def run(job):
        frame, cx, cy, rows, t_lo = job
        state = np.array([math.inf, 0.0, -1.0, 0.0, 0.0, math.inf])
        _kernels.sweep(cx, cy, ws, rows, t_lo, t_phi, v, int(frame), _kernels.FRACTIONS, prune, state)
        return state

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            states = list(pool.map(run, jobs))
    else:
        states = [run(j) for j in jobs]

    best = _Best()
    for job, state in zip(jobs, states):
        if state[2] < 0:
            continue
        frame, _, _, rows, _ = job
        value, alpha, r, fx, fy = state[:5]
        best.offer(value, (int(frame), alpha, fx, fy), (frame, alpha, tuple(rows[int(r)])))
    return best


def _materialize(instance: Instance, case: Provenance, payload, mode, threshold_applied) -> Solution:
    frame, alpha, row = payload
    ax, ay, fx0, fy0, mx, my = row
    t = math.tan(alpha)
    cf = (fx0 + (mx / t if mx != 0 else 0.0), fy0 + my * t)
    h = HighwayLine(min(max(alpha, 0.0), QUARTER_PI), (ax, ay), frame)
    times, shapes = [], []
    for p in instance.points:
        cp = frame.apply(p.x, p.y)
        tt, shape = travel_time(cp, cf, h, instance.v)
        if shape.kind is not Shape.DIRECT:
            shape = PathShape(shape.kind, frame.invert(*shape.entry), frame.invert(*shape.exit))
        times.append(tt)
        shapes.append(shape)
    if case is Provenance.CASE_A:
        if mx == 0 and my == 0:
            constraint = CaseA((ax, ay), GridLine(True, ax))
        elif mx == 0:
            constraint = CaseA((ax, ay), GridLine(True, fx0))
        else:
            constraint = CaseA((ax, ay), GridLine(False, fy0))
    else:
        constraint = CaseB((ax, ay))
    objective = math.fsum(p.w * tt for p, tt in zip(instance.points, times))
    sol = Solution(
        facility=tuple(float(c) for c in frame.invert(*cf)),
        highway=h,
        objective=objective,
        assignments=shapes,
        times=times,
        provenance=case,
        mode=mode,
        v=instance.v,
        constraint=constraint,
        threshold_applied=threshold_applied,
    )
    sol.cover_segment = minimal_cover_segment(sol)
    return sol


def _solve(instance: Instance, cases, mode, threshold_applied, threads, prune) -> Solution:
    instance.require_points()
    started = time.perf_counter()
    nthreads = _thread_count(threads)
    best = _Best()
    for rank, case in enumerate(cases):
        fam = _sweep_family(instance, case, nthreads, prune)
        if fam.key is not None:
            best.offer(fam.value, (rank,) + fam.key, (case, fam.payload))
    case, payload = best.payload
    sol = _materialize(instance, case, payload, mode, threshold_applied)
    sol.wall_time = time.perf_counter() - started
    return sol


def solve_case_a(instance: Instance, *, threads: Optional[int] = None, prune: bool = True) -> Solution:
    return _solve(instance, (Provenance.CASE_A,), "case-a-only", False, threads, prune)


def solve_case_b(instance: Instance, *, threads: Optional[int] = None, prune: bool = True) -> Solution:
    return _solve(instance, (Provenance.CASE_B,), "case-b-only", False, threads, prune)


def solve(instance: Instance, mode: str = "auto", *, threads: Optional[int] = None, prune: bool = True) -> Solution:
    """Optimal facility and highway for ``instance``.

    ``mode`` is ``auto`` (skip Case B when the speed allows it), ``full`` or
    ``case-a-only`` (alias ``case-a``).  Equal objectives are broken by
    provenance (Case A first), frame id, canonical angle, then facility x, y.
    """
    if mode not in MODES:
        raise FFLError(f"unknown mode {mode!r}; expected one of auto, case-a, full")
    mode = MODES[mode]
    skip_b = mode == "case-a-only" or (mode == "auto" and instance.v > THRESHOLD_SPEED + GATE_EPS)
    cases = (Provenance.CASE_A,) if skip_b else (Provenance.CASE_A, Provenance.CASE_B)
    return _solve(instance, cases, mode, mode == "auto" and skip_b, threads, prune)


# --- post-solve checks -----------------------------------------------------------

def _on_grid_line(q: Point, grid: Grid, tol: float) -> bool:
    return any(abs(q[0] - x) <= tol for x in grid.xs) or any(abs(q[1] - y) <= tol for y in grid.ys)


def _on_grid_vertex(q: Point, grid: Grid, tol: float) -> bool:
    return any(abs(q[0] - x) <= tol for x in grid.xs) and any(abs(q[1] - y) <= tol for y in grid.ys)


def check_solution(solution: Solution, instance: Instance) -> list[str]:
    """Structural problems with ``solution``; an empty list means it is sound."""
    problems = []
    pts = instance.points
    grid = build_grid(pts)
    f = solution.facility
    scale = max([1.0, abs(f[0]), abs(f[1])] + [abs(p.x) + abs(p.y) for p in pts])
    tol = EPS * scale

    frame = solution.highway.frame
    cf = frame.apply(*f)
    if solution.highway.distance(cf) > tol:
        problems.append(f"facility {f} is {solution.highway.distance(cf):.3g} off the highway")

    through_point = any(solution.highway.distance(frame.apply(p.x, p.y)) <= tol for p in pts)
    cond_a = through_point and _on_grid_line(f, grid, tol)
    cond_b = _on_grid_vertex(f, grid, tol)
    if not (cond_a or cond_b):
        problems.append("neither discretization condition holds")

    # rides in opposite directions along h must not overlap
    d = solution.highway.input_direction()
    spans = {1: [], -1: []}
    for shape in solution.assignments:
        if shape.kind is Shape.DIRECT:
            continue
        s_in = (shape.entry[0] - f[0]) * d[0] + (shape.entry[1] - f[1]) * d[1]
        if abs(s_in) <= tol:
            continue
        # entering at s_in and riding to the facility at 0
        spans[1 if s_in < 0 else -1].append((min(s_in, 0.0), max(s_in, 0.0)))
    for lo1, hi1 in spans[1]:
        for lo2, hi2 in spans[-1]:
            if min(hi1, hi2) - max(lo1, lo2) > tol:
                problems.append("opposite rides overlap")

    total = math.fsum(p.w * t for p, t in zip(pts, solution.times))
    if abs(total - solution.objective) > tolerance(total):
        problems.append(f"objective {solution.objective} != sum of weighted times {total}")
    for p, shape, t in zip(pts, solution.assignments, solution.times):
        if shape.kind is Shape.DIRECT:
            expect = abs(p.x - f[0]) + abs(p.y - f[1])
        else:
            e = shape.entry
            expect = abs(p.x - e[0]) + abs(p.y - e[1]) + math.hypot(e[0] - f[0], e[1] - f[1]) / instance.v
        if abs(expect - t) > tolerance(expect, scale):
            problems.append(f"time of ({p.x}, {p.y}) does not match its path")
    return problems
