"""Brute-force verifiers that do not rely on the structural lemmas.

``oracle_travel_time`` minimizes the walk-ride-walk cost over entry and exit
points numerically.  ``oracle_solve`` scans the (orientation, offset,
position) space densely and, separately, enumerates the discretized
candidates by sampling the angle and polishing with a bounded scalar search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import (
    EPS,
    QUARTER_PI,
    FFLError,
    Frame,
    HighwayLine,
    Instance,
    PreconditionError,
    check_speed,
    phi_v,
    travel_times,
    travel_times_any,
)

GOLDEN = (math.sqrt(5) - 1) / 2


class ResourceLimitError(FFLError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    angle_samples: int = 256
    offset_samples: int = 64
    entry_samples: int = 33
    refine_iters: int = 60
    max_points: Optional[int] = 10

    def __post_init__(self):
        for name in ("angle_samples", "offset_samples", "entry_samples", "refine_iters"):
            if getattr(self, name) < 2:
                raise PreconditionError(f"{name} must be >= 2, got {getattr(self, name)}")


# --- path oracle -------------------------------------------------------------------

def _golden_bracket(fn, lo, hi, iters):
    """Golden-section search on a convex ``fn`` (vectorized over a batch).

    Returns ``(best_value, final_width)``; the final bracket always contains
    a minimizer, so ``best_value`` is within ``Lipschitz * width`` of the
    minimum.
    """
    a, b = lo.copy(), hi.copy()
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    best = np.minimum(fc, fd)
    for _ in range(iters):
        left = fc <= fd
        # keep [a, d] where the left probe wins, [c, b] otherwise
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = b - GOLDEN * (b - a)
        nd = a + GOLDEN * (b - a)
        c_new = np.where(left, nc, d)
        d_new = np.where(left, c, nd)
        fnew = fn(np.where(left, nc, nd))
        fc_new = np.where(left, fnew, fd)
        fd_new = np.where(left, fc, fnew)
        c, d, fc, fd = c_new, d_new, fc_new, fd_new
        best = np.minimum(best, fnew)
    return best, b - a


def oracle_travel_times(px, py, fx, fy, theta, v, config: OracleConfig = OracleConfig()):
    """Batch version of :func:`oracle_travel_time`; returns ``(times, delta)``.

    The highway has orientation ``theta`` and passes through ``(fx, fy)``.
    Entry ``q1 = f + t1*u`` and exit ``q2 = f + t2*u``; the cost
    ``|p - q1|_1 + |t1 - t2|/v + |t2|*|u|_1`` is jointly convex, so for fixed
    ``t1`` the best ``t2`` is at one of the kinks ``{0, t1}`` and the outer
    problem is a 1D convex minimization over ``t1``.
    """
    px, py, fx, fy, theta = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (px, py, fx, fy, theta)))
    check_speed(v)
    ux, uy = np.cos(theta), np.sin(theta)
    u1 = np.abs(ux) + np.abs(uy)
    dx, dy = px - fx, py - fy
    direct = np.abs(dx) + np.abs(dy)
    # a useful entry point lies within L1 distance ``direct`` of p, hence within 2*direct of f
    span = 2.0 * direct

    def cost(t1):
        walk = np.abs(dx - t1 * ux) + np.abs(dy - t1 * uy)
        ride = np.minimum(np.abs(t1) / v, np.abs(t1) * u1)
        return walk + ride

    m = config.entry_samples
    grid = np.linspace(-1.0, 1.0, m)
    samples = np.stack([cost(g * span) for g in grid], axis=0)
    i = np.argmin(samples, axis=0)
    coarse = samples.min(axis=0)
    step = 2.0 * span / (m - 1)
    lo = (grid[np.maximum(i - 1, 0)]) * span
    hi = (grid[np.minimum(i + 1, m - 1)]) * span
    fine, width = _golden_bracket(cost, lo, hi, config.refine_iters)
    lipschitz = math.sqrt(2) + 1.0 / v
    width = np.where(step > 0, width, 0.0)
    best = np.minimum(np.minimum(direct, coarse), fine)
    delta = lipschitz * width + 1e-12 * (1.0 + direct)
    return best, delta


def oracle_travel_time(p, f, h: HighwayLine, v: float, config: OracleConfig = OracleConfig()):
    """Walk-ride-walk travel time by numerical search; returns ``(time, delta)``.

    ``h`` is a canonical line; ``p`` and ``f`` are in the same frame.
    """
    tol = EPS * max(1.0, abs(f[0]), abs(f[1]), *map(abs, h.anchor))
    if abs(h.offset(f)) > tol:
        raise PreconditionError(f"facility {f} is not on the highway")
    t, d = oracle_travel_times(p[0], p[1], f[0], f[1], h.alpha, v, config)
    return float(t), float(d)


# --- solution oracle -------------------------------------------------------------

@dataclass
class OracleResult:
    lower_certificate: float   # best_sampled - delta
    best_sampled: float        # objective of the best scanned feasible solution
    argmin: tuple              # (facility, theta) of that solution
    candidate_best: float      # best over the discretized candidate families
    candidate_argmin: tuple
    delta: float


def _phi_batch(xs, ys, ws, fx, fy, theta, v):
    """Objective for many (f, theta) at once; trailing axis runs over points."""
    t = travel_times_any(xs, ys, fx[..., None], fy[..., None], theta[..., None], v)
    return (t * ws).sum(axis=-1)


def _dense_scan(xs, ys, ws, v, config: OracleConfig):
    cx, cy = (xs.min() + xs.max()) / 2, (ys.min() + ys.max()) / 2
    radius = max(math.hypot(xs.max() - xs.min(), ys.max() - ys.min()), 1.0)
    thetas = np.linspace(0.0, math.pi, config.angle_samples, endpoint=False)
    offs = np.linspace(-radius, radius, config.offset_samples)
    poss = np.linspace(-radius, radius, config.entry_samples)

    def evaluate(th, off, pos):
        T, O, P = np.meshgrid(th, off, pos, indexing="ij")
        ux, uy = np.cos(T), np.sin(T)
        fx = cx - O * uy + P * ux
        fy = cy + O * ux + P * uy
        vals = np.empty(T.shape)
        for k in range(T.shape[0]):  # one orientation slab at a time keeps memory flat
            vals[k] = _phi_batch(xs, ys, ws, fx[k], fy[k], T[k], v)
        j = np.unravel_index(np.argmin(vals), vals.shape)
        return vals[j], (float(fx[j]), float(fy[j])), (T[j], O[j], P[j])

    best, arg, (th0, o0, p0) = evaluate(thetas, offs, poss)
    theta = th0
    dth = math.pi / config.angle_samples
    doff = 2 * radius / (config.offset_samples - 1)
    dpos = 2 * radius / (config.entry_samples - 1)

    # Lipschitz bound over the scanned box: moving f costs at most its L1 shift,
    # rotating the highway about f costs at most sqrt(2)*ride length, and a ride
    # is never longer than v times the direct distance
    reach = max(abs(xs - cx).max() + abs(ys - cy).max(), 1.0) + 2 * math.sqrt(2) * radius
    wsum = ws.sum()
    l_theta = wsum * math.sqrt(2) * (2 * radius + v * reach)
    l_shift = wsum * math.sqrt(2)
    delta = 0.5 * (l_theta * dth + l_shift * doff + l_shift * dpos)

    # local zoom around the best cell; it only ever lowers best_sampled
    for _ in range(3):
        th = (th0 + np.linspace(-dth, dth, 9)) % math.pi
        off = o0 + np.linspace(-doff, doff, 9)
        pos = p0 + np.linspace(-dpos, dpos, 9)
        val, a, (th0, o0, p0) = evaluate(th, off, pos)
        if val < best:
            best, arg, theta = val, a, th0
        dth, doff, dpos = dth / 4, doff / 4, dpos / 4
    return float(best), (arg, float(theta)), delta


def _candidate_rows(xs, ys, v):
    """All Case A and Case B sweeps in one canonical frame: ``(rows, alpha_lo)``."""
    gx, gy = np.unique(xs), np.unique(ys)
    rows, los = [], []
    phi = phi_v(v)
    for ax, ay in set(zip(xs.tolist(), ys.tolist())):
        for X in gx:
            rows.append((ax, ay, X, ay, 0.0, X - ax))
            los.append(0.0)
        for Y in gy:
            rows.append((ax, ay, ax, Y, Y - ay, 0.0))
            los.append(0.0)
    for ux in gx:
        for uy in gy:
            rows.append((ux, uy, ux, uy, 0.0, 0.0))
            los.append(phi)
    return np.asarray(rows, dtype=float), np.asarray(los)


def _row_objective(xs, ys, ws, row, alpha, v):
    ax, ay, fx0, fy0, mx, my = row
    alpha = np.asarray(alpha, dtype=float)
    t = np.tan(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        fx = fx0 + np.where(mx == 0, 0.0, mx / t)
    fy = fy0 + my * t
    with np.errstate(invalid="ignore"):
        tt = travel_times(xs, ys, fx[..., None], fy[..., None], t[..., None], np.cos(alpha)[..., None], v)
        out = (tt * ws).sum(axis=-1)
    return np.where(np.isfinite(out), out, np.inf)


def _candidate_enumeration(xs, ys, ws, v, samples=1025):
    best, best_arg = math.inf, None
    for frame in (Frame.IDENTITY, Frame.SWAP, Frame.REFLECT_X, Frame.REFLECT_X_SWAP):
        cx, cy = frame.apply(xs, ys)
        cx, cy = np.asarray(cx, dtype=float) + 0.0, np.asarray(cy, dtype=float) + 0.0
        rows, los = _candidate_rows(cx, cy, v)
        for row, lo in zip(rows, los):
            grid = np.linspace(lo, QUARTER_PI, samples)
            vals = _row_objective(cx, cy, ws, row, grid, v)
            finite = vals[np.isfinite(vals)]
            if finite.size == 0:
                continue
            vmin = finite.min()
            padded = np.concatenate([[np.inf], vals, [np.inf]])
            left, mid, right = padded[:-2], padded[1:-1], padded[2:]
            is_min = np.isfinite(mid) & (mid <= left) & (mid <= right)
            # how far the curve could dip between samples, judged from the neighbours
            with np.errstate(invalid="ignore"):
                spread = np.maximum(np.where(np.isfinite(left), np.abs(left - mid), 0.0),
                                    np.where(np.isfinite(right), np.abs(right - mid), 0.0))
                keep = is_min & (mid - spread <= min(best, vmin + 1e-9 * max(1.0, abs(vmin))))
            for i in np.flatnonzero(keep):
                a_lo = grid[max(i - 1, 0)]
                a_hi = grid[min(i + 1, samples - 1)]
                cand_a, cand_v = grid[i], vals[i]
                if a_hi > a_lo:
                    res = minimize_scalar(
                        lambda a: float(_row_objective(cx, cy, ws, row, np.array(a), v)),
                        bounds=(a_lo, a_hi),
                        method="bounded",
                        options={"xatol": 1e-12},
                    )
                    if res.fun < cand_v:
                        cand_a, cand_v = float(res.x), float(res.fun)
                    # Brent stops at a relative tolerance near 1e-8; finish with a local zoom
                    width = 1e-6
                    for _ in range(4):
                        zoom = np.clip(cand_a + np.linspace(-width, width, 65), a_lo, a_hi)
                        zv = _row_objective(cx, cy, ws, row, zoom, v)
                        j = int(np.argmin(zv))
                        if zv[j] < cand_v:
                            cand_a, cand_v = float(zoom[j]), float(zv[j])
                        width /= 32
                if cand_v < best:
                    t = math.tan(cand_a)
                    f = (row[2] + (row[4] / t if row[4] else 0.0), row[3] + row[5] * t)
                    best, best_arg = float(cand_v), (frame.invert(*f), frame.input_angle(cand_a))
    return best, best_arg


def oracle_solve(instance: Instance, config: OracleConfig = OracleConfig()) -> OracleResult:
    """Bracket the optimum of ``instance`` by dense scanning and candidate enumeration."""
    instance.require_points()
    if config.max_points is not None and instance.n > config.max_points:
        raise ResourceLimitError(f"oracle is limited to {config.max_points} points, got {instance.n}")
    xs, ys, ws = instance.arrays()
    v = instance.v
    if instance.n == 1:
        f = (float(xs[0]), float(ys[0]))
        return OracleResult(0.0, 0.0, (f, 0.0), 0.0, (f, 0.0), 0.0)
    best, arg, delta = _dense_scan(xs, ys, ws, v, config)
    cand, cand_arg = _candidate_enumeration(xs, ys, ws, v)
    return OracleResult(best - delta, best, arg, cand, cand_arg, delta)


# --- hunting for configurations that need Case B --------------------------------

def _template(rng):
    """Nine weighted points around a grid vertex at the origin.

    Two points sit on the axes through the origin so ``(0, 0)`` is a grid
    vertex; the rest come in near-mirror pairs about ``y = x`` which makes
    the rotation function nearly symmetric and lets it dip in the middle.
    """
    pts = [(0.0, rng.uniform(1, 6)), (rng.uniform(1, 6), 0.0), (0.0, -rng.uniform(1, 6)), (-rng.uniform(1, 6), 0.0)]
    a, b = rng.uniform(0.5, 4, 2)
    for x, y in ((-a, -b), (-b, -a), (a, b), (b, a)):
        pts.append((x + rng.normal(0, 0.3), y + rng.normal(0, 0.3)))
    pts.append((rng.uniform(-6, 6), rng.uniform(-6, 6)))
    xy = np.round(np.asarray(pts), 2) + 0.0
    w = np.round(rng.uniform(1, 5, len(pts)), 2)
    return xy, w


def find_case_b_instance(seed: int, v: float, budget: int = 100_000, margin: float = 1e-6):
    """Search for an instance where the grid-vertex family strictly beats the other.

    Returns ``(instance, gap)`` or ``None`` when the budget runs out.  For
    ``v > 3*sqrt(2)/4`` no such instance exists and the search comes back
    empty.
    """
    from .solver import solve_case_a, solve_case_b

    check_speed(v)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        xy, w = _template(rng)
        inst = Instance.from_arrays(xy, v, w)
        b = solve_case_b(inst, threads=1).objective
        a = solve_case_a(inst, threads=1).objective
        if b < a - margin:
            return inst, a - b
    return None
