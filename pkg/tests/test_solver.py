import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import COLLINEAR, SQUARE, checked_solve, random_instance
from ffl.geometry import EmptyInstanceError, FFLError, HighwayLine, Instance, phi_v
from ffl.objective import THRESHOLD_SPEED, GridLine, facility_at, partition, CaseA, CaseB
from ffl.solver import (
    Provenance,
    build_grid,
    case_a_events,
    case_b_events,
    solve,
    solve_case_a,
    solve_case_b,
)


def test_build_grid_examples():
    g = build_grid([(0, 0), (4, 0), (10, 0)])
    assert g.xs == (0, 4, 10) and g.ys == (0,)
    g = build_grid([(1, 2), (1, 3)])
    assert g.xs == (1,) and g.ys == (2, 3)
    rng = np.random.default_rng(3)
    g = build_grid(rng.uniform(-1, 1, (9, 2)))
    assert len(g.xs) == 9 and len(g.ys) == 9 and len(g.vertices) == 81
    with pytest.raises(EmptyInstanceError):
        build_grid([])


def test_case_a_event_examples():
    pts = [(0, 0), (4, 4)]
    ev = case_a_events((0, 0), GridLine(True, 4), pts, build_grid(pts), 2.0)
    assert ev.angles[-1] == pytest.approx(math.pi / 4)
    assert all(a < math.pi / 4 for a in ev.angles[:-1])
    ev = case_a_events((0, 0), GridLine(True, 1), [(0, 0)], build_grid([(0, 0)]), 2.0)
    assert ev.angles == pytest.approx((0.0, phi_v(2.0), math.pi / 4))


def test_case_b_event_examples():
    ev = case_b_events((0, 0), [(2, 2)], 2.0)
    assert ev.angles == pytest.approx((phi_v(2.0), math.pi / 4))
    ev = case_b_events((1, 1), [(1, 1), (5, 2)], 1.04)
    assert ev.angles == pytest.approx((phi_v(1.04), math.atan(0.25), math.pi / 4))
    # crossings below phi_v are clipped
    assert len(case_b_events((1, 1), [(1, 1), (5, 2)], 2.0).angles) == 2


def _partitions_constant(pts, cons, events, v):
    for a, b in events.intervals():
        if b - a < 1e-6:
            continue
        labels = []
        for s in (0.2, 0.5, 0.8):
            al = a + s * (b - a)
            f = tuple(float(c) for c in facility_at(cons.params(), al))
            part = partition(pts, f, HighwayLine(al, cons.params()[:2]))
            labels.append(tuple(part.label(i) for i in range(len(pts))))
        assert labels[0] == labels[1] == labels[2]


def test_events_bound_constant_partitions(rng):
    from ffl.geometry import DemandPoint

    for _ in range(10):
        pts = [DemandPoint(*rng.uniform(-5, 5, 2)) for _ in range(8)]
        grid = build_grid(pts)
        v = 1.3
        anchor = (pts[0].x, pts[0].y)
        for line in (GridLine(True, pts[3].x), GridLine(False, pts[5].y)):
            ev = case_a_events(anchor, line, pts, grid, v)
            assert list(ev.angles) == sorted(set(ev.angles))
            _partitions_constant(pts, CaseA(anchor, line), ev, v)
        u = (pts[2].x, pts[6].y)
        _partitions_constant(pts, CaseB(u), case_b_events(u, pts, v), v)


def test_single_point():
    inst = Instance.from_arrays([(3, -2)], 1.5)
    for mode in ("auto", "full", "case-a"):
        sol = checked_solve(inst, mode)
        assert sol.objective == 0 and sol.facility == (3, -2) and sol.angle == 0
    assert solve_case_b(inst).objective == 0


def test_collinear_and_square():
    for mode in ("auto", "full", "case-a"):
        sol = checked_solve(COLLINEAR, mode)
        assert sol.objective == pytest.approx(5.0, abs=1e-9)
        assert sol.facility == pytest.approx((4, 0)) and sol.angle == 0
    sol = checked_solve(SQUARE, "full")
    assert sol.objective == pytest.approx(4 + math.sqrt(2), abs=1e-9)
    assert sol.angle == pytest.approx(math.pi / 4) or sol.angle == pytest.approx(3 * math.pi / 4)
    a, b = sol.cover_segment
    assert {tuple(np.round(a, 9)), tuple(np.round(b, 9))} <= {(1, 1), (-1, -1), (1, -1), (-1, 1)}


def test_modes_and_gate():
    inst = random_instance(np.random.default_rng(1), n=6, v=1.5)
    auto, full, a_only = solve(inst, "auto"), solve(inst, "full"), solve(inst, "case-a-only")
    assert auto.threshold_applied and not full.threshold_applied
    assert auto.objective == a_only.objective
    assert auto.objective == pytest.approx(full.objective, abs=1e-8)
    low = random_instance(np.random.default_rng(2), n=6, v=1.04)
    assert not solve(low, "auto").threshold_applied
    assert solve(low, "auto").objective == solve(low, "full").objective
    with pytest.raises(FFLError):
        solve(inst, "fast")


def test_gate_boundary():
    inst = random_instance(np.random.default_rng(4), n=4, v=THRESHOLD_SPEED)
    assert not solve(inst, "auto").threshold_applied  # hypothesis is strict
    inst = random_instance(np.random.default_rng(4), n=4, v=THRESHOLD_SPEED + 1e-9)
    assert solve(inst, "auto").threshold_applied


def test_case_b_never_beats_case_a_at_high_speed(rng):
    for _ in range(100):
        inst = random_instance(rng, v=2.0)
        assert solve_case_b(inst).objective >= solve_case_a(inst).objective - 1e-9


def test_thread_count_and_pruning_do_not_change_result(rng, monkeypatch):
    inst = random_instance(rng, n=40, v=1.04, lo=-50, hi=50, integer=False)
    ref = solve(inst, "full", threads=1)
    for kw in ({"threads": 4}, {"threads": 1, "prune": False}):
        other = solve(inst, "full", **kw)
        assert other.objective == ref.objective
        assert other.facility == ref.facility and other.highway == ref.highway
    monkeypatch.setenv("FFL_THREADS", "3")
    assert solve(inst, "full").facility == ref.facility
    monkeypatch.setenv("FFL_THREADS", "many")
    with pytest.raises(FFLError):
        solve(inst)


SYMMETRIES = [
    lambda x, y: (x, y), lambda x, y: (-x, y), lambda x, y: (x, -y), lambda x, y: (-x, -y),
    lambda x, y: (y, x), lambda x, y: (-y, x), lambda x, y: (y, -x), lambda x, y: (-y, -x),
]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_frame_invariance(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng)
    base = solve(inst, "full").objective
    xs, ys, ws = inst.arrays()
    for sym in SYMMETRIES[1:]:
        moved = Instance.from_arrays(np.array([sym(x, y) for x, y in zip(xs, ys)]), inst.v, ws)
        assert solve(moved, "full").objective == pytest.approx(base, rel=1e-9, abs=1e-9)


def _shifted_objective(inst, f, theta, offset):
    """Objective with the highway moved off the facility, by brute force over entry and exit."""
    u = np.array([math.cos(theta), math.sin(theta)])
    nrm = np.array([-u[1], u[0]])
    base = np.asarray(f) + offset * nrm
    s = np.linspace(-40, 40, 801)
    q = base + s[:, None] * u
    total = 0.0
    for p in inst.points:
        walk_in = np.abs(p.x - q[:, 0]) + np.abs(p.y - q[:, 1])
        walk_out = np.abs(q[:, 0] - f[0]) + np.abs(q[:, 1] - f[1])
        ride = np.abs(s[:, None] - s[None, :]) / inst.v
        best = (walk_in[:, None] + ride + walk_out[None, :]).min()
        total += p.w * min(best, abs(p.x - f[0]) + abs(p.y - f[1]))
    return total


def test_facility_on_highway_beats_parallel_shifts(rng):
    for _ in range(5):
        inst = random_instance(rng, n=5)
        sol = checked_solve(inst, "full")
        for off in rng.uniform(-3, 3, 4):
            assert sol.objective <= _shifted_objective(inst, sol.facility, sol.angle, off) + 1e-9


def test_monotone_in_speed(rng):
    for _ in range(10):
        inst = random_instance(rng)
        xs, ys, ws = inst.arrays()
        vals = [solve(Instance.from_arrays(np.c_[xs, ys], v, ws), "full").objective for v in (1.1, 1.2, 1.5, 2, 4)]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


def test_duplicate_points_add_weight():
    a = Instance.from_arrays([(0, 0), (0, 0), (5, 3)], 2.0, [1, 2, 1])
    b = Instance.from_arrays([(0, 0), (5, 3)], 2.0, [3, 1])
    assert checked_solve(a, "full").objective == pytest.approx(checked_solve(b, "full").objective, abs=1e-12)


def test_provenance_and_discretization(rng):
    for _ in range(30):
        inst = random_instance(rng, v=1.04)
        sol = checked_solve(inst, "full")
        assert sol.provenance in (Provenance.CASE_A, Provenance.CASE_B)
