"""Domain types and L1/time-metric primitives.

Every geometric routine here works in a *canonical frame*: the highway makes
an angle ``alpha`` in ``[0, pi/4]`` with the positive x-axis.  The four
:class:`Frame` transforms (coordinate swaps and sign flips, all isometries of
both L1 and L2) bring an arbitrary line orientation into that range.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

EPS = 1e-9
QUARTER_PI = math.pi / 4
SQRT2 = math.sqrt(2.0)

Point = tuple[float, float]


class FFLError(ValueError):
    """Base class for all input and precondition errors raised by the package."""


class InvalidSpeedError(FFLError):
    pass


class InvalidPointError(FFLError):
    pass


class EmptyInstanceError(FFLError):
    pass


class PreconditionError(FFLError):
    pass


class DegenerateProjectionError(FFLError):
    pass


def tolerance(*coords: float) -> float:
    """Absolute tolerance scaled to the magnitude of the coordinates involved."""
    scale = max((abs(c) for c in coords if math.isfinite(c)), default=0.0)
    return EPS * max(1.0, scale)


@dataclass(frozen=True)
class DemandPoint:
    x: float
    y: float
    w: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidPointError(f"coordinates must be finite, got ({self.x}, {self.y})")
        if not (math.isfinite(self.w) and self.w > 0):
            raise InvalidPointError(f"weight must be positive, got w={self.w}")

    @property
    def xy(self) -> Point:
        return (self.x, self.y)


@dataclass(frozen=True)
class Instance:
    points: tuple[DemandPoint, ...]
    v: float

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        check_speed(self.v)

    @classmethod
    def from_arrays(cls, xy, v: float, w=None) -> "Instance":
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        if w is None:
            w = np.ones(len(xy))
        return cls(tuple(DemandPoint(float(x), float(y), float(wi)) for (x, y), wi in zip(xy, w)), v)

    @property
    def n(self) -> int:
        return len(self.points)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(xs, ys, ws)`` as float arrays."""
        a = np.array([(p.x, p.y, p.w) for p in self.points], dtype=float).reshape(-1, 3)
        return a[:, 0].copy(), a[:, 1].copy(), a[:, 2].copy()

    def require_points(self):
        if not self.points:
            raise EmptyInstanceError("instance has no demand points")


def check_speed(v: float) -> None:
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 1):
        raise InvalidSpeedError(f"highway speed must satisfy v > 1, got v={v}")


def phi_v(v: float) -> float:
    """Critical highway angle below which every client reaches the highway vertically."""
    check_speed(v)
    return QUARTER_PI - math.asin(SQRT2 / (2.0 * v))


class Frame(enum.IntEnum):
    """L1/L2 isometries used to normalize the highway angle into ``[0, pi/4]``."""

    IDENTITY = 0
    SWAP = 1
    REFLECT_X = 2
    REFLECT_X_SWAP = 3

    def apply(self, x, y):
        """Map input-frame coordinates to this canonical frame."""
        if self is Frame.IDENTITY:
            return x, y
        if self is Frame.SWAP:
            return y, x
        if self is Frame.REFLECT_X:
            return -x, y
        return y, -x

    def invert(self, x, y):
        """Map canonical coordinates back to the input frame."""
        if self is Frame.IDENTITY:
            return x, y
        if self is Frame.SWAP:
            return y, x
        if self is Frame.REFLECT_X:
            return -x, y
        return -y, x

    def input_angle(self, alpha: float) -> float:
        """Orientation in ``[0, pi)`` of the input-frame line whose canonical angle is ``alpha``."""
        if self is Frame.IDENTITY:
            theta = alpha
        elif self is Frame.SWAP:
            theta = math.pi / 2 - alpha
        elif self is Frame.REFLECT_X:
            theta = math.pi - alpha
        else:
            theta = math.pi / 2 + alpha
        return theta % math.pi


def canonicalize(points: Sequence[Point], theta: float):
    """Pick the frame that maps orientation ``theta`` into ``[0, pi/4]``.

    Returns ``(frame, transformed_points, alpha)``.
    """
    if not 0 <= theta < math.pi:
        raise PreconditionError(f"theta must lie in [0, pi), got {theta}")
    if theta <= QUARTER_PI:
        frame, alpha = Frame.IDENTITY, theta
    elif theta <= math.pi / 2:
        frame, alpha = Frame.SWAP, math.pi / 2 - theta
    elif theta < 3 * QUARTER_PI:
        frame, alpha = Frame.REFLECT_X_SWAP, theta - math.pi / 2
    else:
        frame, alpha = Frame.REFLECT_X, math.pi - theta
    moved = [frame.apply(x, y) for x, y in points]
    return frame, moved, min(max(alpha, 0.0), QUARTER_PI)


@dataclass(frozen=True)
class HighwayLine:
    """Infinite highway: canonical angle, a canonical point on it, and its frame."""

    alpha: float
    anchor: Point
    frame: Frame = Frame.IDENTITY

    def __post_init__(self):
        if not -EPS <= self.alpha <= QUARTER_PI + EPS:
            raise PreconditionError(f"canonical angle must lie in [0, pi/4], got {self.alpha}")

    @property
    def direction(self) -> Point:
        return (math.cos(self.alpha), math.sin(self.alpha))

    def y_at(self, x: float) -> float:
        return self.anchor[1] + (x - self.anchor[0]) * math.tan(self.alpha)

    def x_at(self, y: float) -> float:
        if self.alpha <= 0:
            raise DegenerateProjectionError("horizontal highway has no horizontal projection")
        return self.anchor[0] + (y - self.anchor[1]) / math.tan(self.alpha)

    def offset(self, p: Point) -> float:
        """Signed vertical offset of ``p`` above the line (positive above)."""
        return p[1] - self.y_at(p[0])

    def distance(self, p: Point) -> float:
        """Euclidean distance from ``p`` to the line."""
        return abs(self.offset(p)) * math.cos(self.alpha)

    def contains(self, p: Point, tol: Optional[float] = None) -> bool:
        if tol is None:
            tol = tolerance(p[0], p[1], *self.anchor)
        return self.distance(p) <= tol

    def input_angle(self) -> float:
        return self.frame.input_angle(self.alpha)

    def input_point(self, p: Point) -> Point:
        return self.frame.invert(*p)

    def input_direction(self) -> Point:
        theta = self.input_angle()
        return (math.cos(theta), math.sin(theta))


@dataclass(frozen=True)
class HalfLine:
    origin: Point
    direction: Optional[Point]  # None when both projections coincide

    def contains(self, q: Point, tol: float = EPS) -> bool:
        if self.direction is None:
            return math.hypot(q[0] - self.origin[0], q[1] - self.origin[1]) <= tol
        t = (q[0] - self.origin[0]) * self.direction[0] + (q[1] - self.origin[1]) * self.direction[1]
        return t >= -tol


@dataclass(frozen=True)
class ProjectionData:
    p_prime: Point
    p_dblprime: Optional[Point]
    half_line_pprime: HalfLine
    half_line_pdblprime: Optional[HalfLine]


def project(p, h: HighwayLine) -> ProjectionData:
    """Vertical (``p'``) and horizontal (``p''``) projections of ``p`` onto ``h``."""
    px, py = _xy(p)
    if h.alpha <= 0:
        raise DegenerateProjectionError("horizontal projection is undefined for alpha = 0")
    pp = (px, h.y_at(px))
    ppp = (h.x_at(py), py)
    dx, dy = pp[0] - ppp[0], pp[1] - ppp[1]
    norm = math.hypot(dx, dy)
    if norm <= tolerance(px, py):
        return ProjectionData(pp, ppp, HalfLine(pp, None), HalfLine(ppp, None))
    u = (dx / norm, dy / norm)
    return ProjectionData(pp, ppp, HalfLine(pp, u), HalfLine(ppp, (-u[0], -u[1])))


class Shape(enum.Enum):
    DIRECT = "direct"
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class PathShape:
    kind: Shape
    entry: Optional[Point] = None
    exit: Optional[Point] = None

    def __post_init__(self):
        if self.kind is Shape.DIRECT and (self.entry is not None or self.exit is not None):
            raise PreconditionError("direct paths have no entry/exit points")
        if self.kind is not Shape.DIRECT and (self.entry is None or self.exit is None):
            raise PreconditionError("highway paths need entry and exit points")


def _xy(p) -> Point:
    if isinstance(p, DemandPoint):
        return p.x, p.y
    return float(p[0]), float(p[1])


def travel_time(p, f: Point, h: HighwayLine, v: float) -> tuple[float, PathShape]:
    """Time-metric travel time from ``p`` to a facility ``f`` lying on ``h``.

    Only three path shapes can be optimal: walk directly, walk vertically to
    the highway and ride, or walk horizontally to the highway and ride.  Ties
    prefer direct, then vertical, then horizontal.
    """
    check_speed(v)
    px, py = _xy(p)
    fx, fy = float(f[0]), float(f[1])
    tol = tolerance(px, py, fx, fy, *h.anchor)
    if abs(h.offset((fx, fy))) > tol:
        raise PreconditionError(f"facility {f} is not on the highway")

    direct = abs(px - fx) + abs(py - fy)
    qy = h.y_at(px)
    vert = abs(py - qy) + math.hypot(px - fx, qy - fy) / v
    horiz = math.inf
    if h.alpha > 0:
        qx = h.x_at(py)
        horiz = abs(px - qx) + math.hypot(qx - fx, py - fy) / v
    best = min(direct, vert, horiz)
    if direct <= best + tol:
        return best, PathShape(Shape.DIRECT)
    if vert <= best + tol:
        return best, PathShape(Shape.VERTICAL, (px, qy), (fx, fy))
    return best, PathShape(Shape.HORIZONTAL, (qx, py), (fx, fy))


def travel_times(px, py, fx, fy, tan_alpha, cos_alpha, v):
    """Vectorized travel time for canonical highways through ``f`` with slope ``tan_alpha``.

    All arguments broadcast.  ``tan_alpha == 0`` disables the horizontal branch.
    """
    dx = px - fx
    dy = py - fy
    direct = np.abs(dx) + np.abs(dy)
    vert = np.abs(dy - dx * tan_alpha) + np.abs(dx) / (cos_alpha * v)
    with np.errstate(divide="ignore", invalid="ignore"):
        run = dy / tan_alpha
        sin_alpha = tan_alpha * cos_alpha
        horiz = np.abs(dx - run) + np.abs(dy) / (sin_alpha * v)
    horiz = np.where(tan_alpha > 0, horiz, np.inf)
    return np.minimum(direct, np.minimum(vert, np.nan_to_num(horiz, nan=np.inf)))


def travel_times_any(px, py, fx, fy, theta, v):
    """Vectorized travel time for a highway through ``f`` at any orientation ``theta``.

    Uses the same three-shape formula; the frame isometries make it valid for
    every orientation, with the vertical branch disabled for vertical
    highways and the horizontal branch for horizontal ones.
    """
    c = np.cos(theta)
    s = np.sin(theta)
    dx = px - fx
    dy = py - fy
    direct = np.abs(dx) + np.abs(dy)
    with np.errstate(divide="ignore", invalid="ignore"):
        vert = np.abs(dy - dx * (s / c)) + np.abs(dx) / (np.abs(c) * v)
        horiz = np.abs(dx - dy * (c / s)) + np.abs(dy) / (np.abs(s) * v)
    vert = np.where(np.abs(c) > 1e-15, vert, np.inf)
    horiz = np.where(np.abs(s) > 1e-15, horiz, np.inf)
    vert = np.nan_to_num(vert, nan=np.inf)
    horiz = np.nan_to_num(horiz, nan=np.inf)
    return np.minimum(direct, np.minimum(vert, horiz))


def segment_on_line(points: Sequence[Point], origin: Point, direction: Point) -> tuple[Point, Point]:
    """Shortest segment of the line ``origin + t*direction`` covering the projections of ``points``."""
    ts = [(q[0] - origin[0]) * direction[0] + (q[1] - origin[1]) * direction[1] for q in points]
    lo, hi = min(ts, default=0.0), max(ts, default=0.0)
    lo, hi = min(lo, 0.0), max(hi, 0.0)
    return (
        (origin[0] + lo * direction[0], origin[1] + lo * direction[1]),
        (origin[0] + hi * direction[0], origin[1] + hi * direction[1]),
    )


def minimal_cover_segment(solution) -> tuple[Point, Point]:
    """Shortest piece of the highway that every riding client enters and leaves on.

    Returns the degenerate segment ``(f, f)`` when nobody rides.
    """
    f = solution.facility
    stops = []
    for shape in solution.assignments:
        if shape.kind is not Shape.DIRECT:
            stops.extend([shape.entry, shape.exit])
    if not stops:
        return (f, f)
    return segment_on_line(stops, f, solution.highway.input_direction())
