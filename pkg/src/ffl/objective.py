"""Closed-form objective, per-interval trigonometric forms and their minimization.

Along a sweep the facility ``f`` and highway ``h`` move with the angle
``alpha``; between consecutive events the total weighted travel time is

    c1 + c2*tan(a) + c3*cot(a) + c4*sec(a) + c5*csc(a)

for constant coefficients.  This module builds those coefficients and
minimizes such forms over an interval.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .geometry import (
    EPS,
    QUARTER_PI,
    DemandPoint,
    FFLError,
    HighwayLine,
    Point,
    PreconditionError,
    check_speed,
    phi_v,
    tolerance,
)

THRESHOLD_SPEED = 3 * math.sqrt(2) / 4


class StaleFormError(FFLError):
    """The requested interval contains an event, so no single form is valid on it."""


class OutOfScopeError(FFLError):
    pass


class Regime(enum.Enum):
    LOW = "low"    # alpha <= phi_v: everybody walks vertically to the highway
    HIGH = "high"


@dataclass(frozen=True)
class Partition:
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    s3: tuple[int, ...]

    def label(self, i: int) -> int:
        return 1 if i in self.s1 else 2 if i in self.s2 else 3


def _membership(dx, dy, side, tol):
    """Boolean masks (s1, s2, s3) from offsets to ``f`` and signed offset to ``h``."""
    s1 = ((dx <= 0) & (dy >= 0)) | ((dx >= 0) & (dy <= 0))
    below = side <= tol
    above = side >= -tol
    s2 = ~s1 & (((dx < 0) & below) | ((dx > 0) & above))
    return s1, s2, ~(s1 | s2)


def partition(points: Sequence[DemandPoint], f: Point, h: HighwayLine) -> Partition:
    """Split demand points into the three groups that share a travel-time formula."""
    fx, fy = f
    s1, s2, s3 = [], [], []
    for i, p in enumerate(points):
        tol = tolerance(p.x, p.y, fx, fy)
        m1, m2, _ = _membership(p.x - fx, p.y - fy, h.offset((p.x, p.y)), tol)
        (s1 if m1 else s2 if m2 else s3).append(i)
    return Partition(tuple(s1), tuple(s2), tuple(s3))


def eval_phi_closed(points: Sequence[DemandPoint], f: Point, h: HighwayLine, v: float) -> float:
    """Objective from the closed forms of the low- and high-angle regimes."""
    part = partition(points, f, h)
    fx, fy = f
    a = h.alpha

    def sums(idx):
        wx = sum(points[i].w * abs(points[i].x - fx) for i in idx)
        wy = sum(points[i].w * abs(points[i].y - fy) for i in idx)
        return wx, wy

    (x1, y1), (x2, y2), (x3, y3) = sums(part.s1), sums(part.s2), sums(part.s3)
    if a <= phi_v(v):
        return (
            y1 + y2 - y3
            + math.tan(a) * (x1 - x2 + x3)
            + (x1 + x2 + x3) / (math.cos(a) * v)
        )
    return (
        (x1 + y1) + y2 + x3
        + (1 / (math.cos(a) * v) - math.tan(a)) * x2
        + (1 / (math.sin(a) * v) - 1 / math.tan(a)) * y3
    )


# --- sweep constraints -------------------------------------------------------

@dataclass(frozen=True)
class GridLine:
    vertical: bool
    value: float

    def __str__(self):
        return f"{'x' if self.vertical else 'y'} = {self.value:g}"


@dataclass(frozen=True)
class CaseA:
    """Highway pivots about demand point ``anchor``; facility slides on grid ``line``."""

    anchor: Point
    line: GridLine

    def params(self):
        ax, ay = self.anchor
        if self.line.vertical:
            X = self.line.value
            return ax, ay, X, ay, 0.0, X - ax
        Y = self.line.value
        return ax, ay, ax, Y, Y - ay, 0.0


@dataclass(frozen=True)
class CaseB:
    """Highway pivots about a fixed facility at grid vertex ``vertex``."""

    vertex: Point

    def params(self):
        ux, uy = self.vertex
        return ux, uy, ux, uy, 0.0, 0.0


Constraint = Union[CaseA, CaseB]


def facility_at(params, alpha):
    """Facility position along a sweep; works on arrays.

    ``params`` is ``(ax, ay, fx0, fy0, mx, my)``: the highway pivots about
    ``(ax, ay)`` and the facility sits at ``(fx0 + mx*cot(a), fy0 + my*tan(a))``.
    """
    _, _, fx0, fy0, mx, my = params
    t = np.tan(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        cot_term = np.where(np.asarray(mx) == 0, 0.0, np.asarray(mx) / t)
    return fx0 + cot_term, fy0 + my * t


def constraint_events(points: Sequence[DemandPoint], constraint: Constraint, lo=0.0, hi=QUARTER_PI):
    """Sorted angles strictly inside ``(lo, hi)`` where some point changes formula.

    ``phi_v`` is not included; callers add it.
    """
    params = np.asarray(constraint.params(), dtype=float)
    buf = np.empty(3)
    tl, th = math.tan(lo), math.tan(hi)
    out = []
    for p in points:
        k = _kernels.point_events(p.x, p.y, *params, tl, th, buf)
        out.extend(math.atan(t) for t in buf[:k])
    return sorted(out)


# --- forms ---------------------------------------------------------------------

@dataclass(frozen=True)
class ObjectiveForm:
    """``c1 + c2 tan + c3 cot + c4 sec + c5 csc`` valid on ``[lo, hi]``."""

    coeffs: tuple[float, float, float, float, float]
    lo: float
    hi: float
    regime: Regime

    def __call__(self, alpha):
        return form_values(np.asarray(self.coeffs, dtype=float), alpha)

    def derivative(self, alpha):
        return form_derivatives(np.asarray(self.coeffs, dtype=float), alpha)


def form_values(coeffs, alpha):
    """Evaluate forms; ``coeffs`` has a trailing axis of 5 and broadcasts with ``alpha``.

    At ``alpha = 0`` the one-sided limit is returned (``+inf`` when cot/csc
    terms are present with positive total weight).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    c1, c2, c3, c4, c5 = np.moveaxis(coeffs, -1, 0)
    s, c = np.sin(alpha), np.cos(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = c1 + c2 * (s / c) + c4 / c + np.where(c3 == 0, 0.0, c3 * c / s) + np.where(c5 == 0, 0.0, c5 / s)
        lim = np.where(c3 + c5 > 0, np.inf, np.where(c3 + c5 < 0, -np.inf, 0.0))
    return np.where(alpha <= 0, c1 + c4 + lim, val)


def form_derivatives(coeffs, alpha):
    coeffs = np.asarray(coeffs, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    c1, c2, c3, c4, c5 = np.moveaxis(coeffs, -1, 0)
    s, c = np.sin(alpha), np.cos(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (c2 + c4 * s) / c**2 - np.where(c3 == 0, 0.0, c3 / s**2) - np.where(c5 == 0, 0.0, c5 * c / s**2)
        lim = np.where(c3 + c5 > 0, -np.inf, np.where(c3 + c5 < 0, np.inf, c2 + c4 * s))
    return np.where(alpha <= 0, lim, val)


def minimize_form(form: ObjectiveForm) -> tuple[float, float]:
    """Minimum of ``form`` on its interval as ``(alpha, value)``.

    Endpoints are evaluated, sign changes of the derivative are bracketed on
    64 uniform sub-steps (plus a few points crowding the left end, where
    cot/csc terms can blow up) and bisected to 1e-12.  Ties go to the
    smaller angle.
    """
    if form.hi < form.lo:
        raise PreconditionError(f"empty interval [{form.lo}, {form.hi}]")
    c = np.asarray(form.coeffs, dtype=float)
    a, val = _kernels.minimize_interval(c, float(form.lo), float(form.hi), _kernels.FRACTIONS)
    return float(a), float(val)


def assemble_form(points: Sequence[DemandPoint], constraint: Constraint, interval, v: float) -> ObjectiveForm:
    """Coefficients of the objective along ``constraint`` on an event-free interval."""
    check_speed(v)
    lo, hi = map(float, interval)
    if not (0 <= lo <= hi <= QUARTER_PI + EPS):
        raise PreconditionError(f"interval [{lo}, {hi}] must lie inside [0, pi/4]")
    hi = min(hi, QUARTER_PI)
    phi = phi_v(v)
    tol = EPS * max(1.0, hi)
    events = constraint_events(points, constraint, lo + tol, hi - tol) if hi - lo > 2 * tol else []
    if lo + tol < phi < hi - tol:
        events.append(phi)
    if events:
        raise StaleFormError(f"event at alpha={min(events):.12g} inside [{lo}, {hi}]")

    params = constraint.params()
    mid = 0.5 * (lo + hi)
    low = mid <= phi
    t = math.tan(mid)
    coef = np.zeros(5)
    for p in points:
        coef += _kernels.piece_coef(p.x, p.y, p.w, *params, t, low, v)
    regime = Regime.LOW if low else Regime.HIGH
    return ObjectiveForm(tuple(float(c) for c in coef), lo, hi, regime)


# --- analysis of the rotation function --------------------------------------

class FShape(enum.Enum):
    CONSTANT = "constant"
    DECREASING = "decreasing"
    INCREASING = "increasing"
    NO_INTERIOR_MINIMUM = "no-interior-minimum"
    INTERIOR_MINIMUM = "interior-minimum"  # would contradict the lemma for v > 3*sqrt(2)/4


def lemma_case(a: float, b: float) -> FShape:
    """Shape of ``F`` predicted from which of ``a``, ``b`` vanish."""
    if a == 0 and b == 0:
        return FShape.CONSTANT
    if b == 0:
        return FShape.DECREASING
    if a == 0:
        return FShape.INCREASING
    return FShape.NO_INTERIOR_MINIMUM


_F_GRID = np.unique(np.concatenate([
    np.linspace(0, math.pi / 2, 20001)[1:-1],
    np.geomspace(1e-9, 0.05, 400),
    math.pi / 2 - np.geomspace(1e-9, 0.05, 400),
]))


def rotation_function(a, b, c, v, x):
    """``F(x) = a(1 - v sin x)/cos x + b(1 - v cos x)/sin x + c``."""
    return a * (1 - v * np.sin(x)) / np.cos(x) + b * (1 - v * np.cos(x)) / np.sin(x) + c


def f_validator(a: float, b: float, c: float, v: float) -> FShape:
    """Classify ``F`` on ``(0, pi/2)`` by dense sampling.

    The sample grid crowds both ends so maxima hugging the boundary are seen.
    """
    if min(a, b, c) < 0:
        raise PreconditionError("a, b, c must be non-negative")
    if not v > THRESHOLD_SPEED:
        raise OutOfScopeError(f"classification needs v > 3*sqrt(2)/4, got v={v}")
    F = rotation_function(a, b, c, v, _F_GRID)
    diff = np.diff(F)
    scale = np.maximum(np.abs(F[1:]), np.abs(F[:-1])) + 1.0
    sig = np.where(np.abs(diff) <= 1e-13 * scale, 0, np.sign(diff))
    nz = sig[sig != 0]
    if nz.size == 0:
        return FShape.CONSTANT
    # a decrease followed later by an increase means an interior local minimum
    first_down = np.argmax(nz < 0) if np.any(nz < 0) else nz.size
    if np.any(nz[first_down:] > 0):
        return FShape.INTERIOR_MINIMUM
    if np.all(nz < 0):
        return FShape.DECREASING
    if np.all(nz > 0):
        return FShape.INCREASING
    return FShape.NO_INTERIOR_MINIMUM
