"""Poses, oriented rectangles, vehicle footprints and exact collision tests.

Everything here is plain Python on immutable values. The planner uses the
compiled twins in :mod:`valetplan.planner._kernels`; these versions double as
the independent re-check for planner output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

SIDES = ("left", "right", "bottom", "top")

#: Separating-axis slack. A gap must exceed this to count as separation, so
#: touching rectangles intersect.
COLLISION_TOL = 1e-9


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    t = math.fmod(theta + math.pi, 2.0 * math.pi)
    if t < 0.0:
        t += 2.0 * math.pi
    t -= math.pi
    # fmod rounding can land exactly on +pi
    if t >= math.pi:
        t -= 2.0 * math.pi
    return t


@dataclass(frozen=True)
class Pose:
    """Rear-axle pose: position in meters, heading in radians CCW from +x."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    def translated(self, dx: float, dy: float) -> "Pose":
        return Pose(self.x + dx, self.y + dy, self.theta)


@dataclass(frozen=True)
class OrientedRect:
    center: tuple[float, float]
    half_width: float
    half_length: float
    theta: float

    def __post_init__(self):
        if not (self.half_width > 0 and self.half_length > 0):
            raise ValueError("rectangle half extents must be positive")

    def axes(self) -> tuple[tuple[float, float], tuple[float, float]]:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (c, s), (-s, c)

    def corners(self) -> list[tuple[float, float]]:
        (ux, uy), (vx, vy) = self.axes()
        cx, cy = self.center
        hl, hw = self.half_length, self.half_width
        return [
            (cx + sl * hl * ux + sw * hw * vx, cy + sl * hl * uy + sw * hw * vy)
            for sl, sw in ((1, 1), (-1, 1), (-1, -1), (1, -1))
        ]

    def contains(self, px: float, py: float) -> bool:
        """Closed point-in-rectangle test."""
        (ux, uy), (vx, vy) = self.axes()
        dx, dy = px - self.center[0], py - self.center[1]
        return (abs(dx * ux + dy * uy) <= self.half_length
                and abs(dx * vx + dy * vy) <= self.half_width)

    def translated(self, dx: float, dy: float) -> "OrientedRect":
        return OrientedRect((self.center[0] + dx, self.center[1] + dy),
                            self.half_width, self.half_length, self.theta)

    def bounds(self) -> tuple[float, float, float, float]:
        xs, ys = zip(*self.corners())
        return min(xs), min(ys), max(xs), max(ys)

    @classmethod
    def from_box(cls, x0: float, y0: float, x1: float, y1: float) -> "OrientedRect":
        """Axis-aligned box; the long side becomes the length axis."""
        w, h = x1 - x0, y1 - y0
        center = ((x0 + x1) / 2.0, (y0 + y1) / 2.0)
        if w >= h:
            return cls(center, h / 2.0, w / 2.0, 0.0)
        return cls(center, w / 2.0, h / 2.0, math.pi / 2.0)


@dataclass(frozen=True)
class VehicleSpec:
    width: float
    length: float
    wheelbase: float
    front_overhang: float
    rear_overhang: float
    max_steer: float

    def __post_init__(self):
        total = self.wheelbase + self.front_overhang + self.rear_overhang
        if abs(total - self.length) > 1e-9:
            raise ValueError(
                f"wheelbase + overhangs = {total} does not equal length {self.length}")
        if self.max_steer <= 0:
            raise ValueError("max_steer must be positive")
        if self.width <= 0 or self.wheelbase <= 0:
            raise ValueError("vehicle width and wheelbase must be positive")

    @property
    def min_turning_radius(self) -> float:
        return self.wheelbase / math.tan(self.max_steer)


DEFAULT_VEHICLE = VehicleSpec(width=2.5, length=9.0, wheelbase=4.240,
                            front_overhang=1.885, rear_overhang=2.875,
                            max_steer=math.pi / 6.0)


@dataclass(frozen=True)
class EntranceSegment:
    side: str
    span: tuple[float, float]

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"unknown side {self.side!r}")
        lo, hi = self.span
        if not hi > lo:
            raise ValueError("entrance span must be nonempty")


@dataclass(frozen=True)
class LotSpec:
    """Rectangular lot. x runs along ``length_L``, y along ``width_W``.

    The left side is x = 0, the bottom side is y = 0.
    """

    width_W: float
    length_L: float
    entrances: tuple[EntranceSegment, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "entrances", tuple(self.entrances))
        if self.width_W <= 0 or self.length_L <= 0:
            raise ValueError("lot dimensions must be positive")
        for e in self.entrances:
            lo, hi = e.span
            if lo < -1e-9 or hi > self.side_length(e.side) + 1e-9:
                raise ValueError(f"entrance {e} lies outside its side")
        for side in SIDES:
            spans = sorted(e.span for e in self.entrances if e.side == side)
            for (_, a_hi), (b_lo, _) in zip(spans, spans[1:]):
                if b_lo < a_hi:
                    raise ValueError(f"overlapping entrances on side {side}")

    @classmethod
    def with_left_entrance(cls, length_L: float, width_W: float) -> "LotSpec":
        return cls(width_W=width_W, length_L=length_L,
                   entrances=(EntranceSegment("left", (0.0, width_W)),))

    def side_length(self, side: str) -> float:
        return self.width_W if side in ("left", "right") else self.length_L

    def side_points(self, side: str, lo: float, hi: float):
        """Endpoints of the boundary piece ``[lo, hi]`` measured along ``side``."""
        L, W = self.length_L, self.width_W
        if side == "left":
            return (0.0, lo), (0.0, hi)
        if side == "right":
            return (L, lo), (L, hi)
        if side == "bottom":
            return (lo, 0.0), (hi, 0.0)
        return (lo, W), (hi, W)

    def wall_segments(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        """Boundary pieces not covered by any entrance."""
        out = []
        for side in SIDES:
            cursor, end = 0.0, self.side_length(side)
            for lo, hi in sorted(e.span for e in self.entrances if e.side == side):
                if lo > cursor:
                    out.append(self.side_points(side, cursor, lo))
                cursor = max(cursor, hi)
            if end > cursor:
                out.append(self.side_points(side, cursor, end))
        return out


def footprint(pose: Pose, spec: VehicleSpec) -> OrientedRect:
    """Body rectangle of a vehicle whose rear axle sits at ``pose``."""
    ahead = spec.wheelbase + spec.front_overhang
    offset = (ahead - spec.rear_overhang) / 2.0
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return OrientedRect((pose.x + offset * c, pose.y + offset * s),
                        spec.width / 2.0, spec.length / 2.0, pose.theta)


def _project(points: Iterable[tuple[float, float]], ax: float, ay: float):
    vals = [px * ax + py * ay for px, py in points]
    return min(vals), max(vals)


def _separated(pa: Sequence[tuple[float, float]], pb: Sequence[tuple[float, float]],
               axes, tol: float) -> bool:
    for ax, ay in axes:
        amin, amax = _project(pa, ax, ay)
        bmin, bmax = _project(pb, ax, ay)
        if bmin - amax > tol or amin - bmax > tol:
            return True
    return False


def rects_intersect(r1: OrientedRect, r2: OrientedRect, tol: float = COLLISION_TOL) -> bool:
    """Closed-rectangle overlap via the separating-axis test; touching counts."""
    axes = (*r1.axes(), *r2.axes())
    return not _separated(r1.corners(), r2.corners(), axes, tol)


def segment_intersects_rect(p: tuple[float, float], q: tuple[float, float],
                            rect: OrientedRect, tol: float = COLLISION_TOL) -> bool:
    dx, dy = q[0] - p[0], q[1] - p[1]
    n = math.hypot(dx, dy)
    axes = [*rect.axes(), (dx / n, dy / n), (-dy / n, dx / n)]
    return not _separated([p, q], rect.corners(), axes, tol)


def pose_collision_free(pose: Pose, spec: VehicleSpec, obstacles: Sequence[OrientedRect],
                        lot: LotSpec) -> bool:
    """True iff the footprint hits no obstacle and crosses no non-entrance boundary."""
    fp = footprint(pose, spec)
    for ob in obstacles:
        if rects_intersect(fp, ob):
            return False
    for p, q in lot.wall_segments():
        if segment_intersects_rect(p, q, fp):
            return False
    return True
