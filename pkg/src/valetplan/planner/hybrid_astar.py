"""Hybrid A* front end: parameters, goal regions, paths and stall exit queries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ..geometry import (EntranceSegment, LotSpec, OrientedRect, Pose, VehicleSpec,
                        footprint)
from ..layout import Layout
from . import _kernels as K

GEAR_CODES = {1: "F", -1: "R"}


class UnknownStall(KeyError):
    pass


class OccupiedStart(ValueError):
    pass


@dataclass(frozen=True)
class PlannerParams:
    max_iterations: int = 100_000
    step_sizes: tuple[float, ...] = (0.5, 1.0, 2.0)
    angle_resolution: float = math.pi / 36.0
    xy_resolution: float = 0.25
    steer_samples: int = 9
    reverse_surcharge: float = 0.1
    gear_switch_penalty: float = 0.5
    heading_weight_near: float = 2.5
    heading_weight_far: float = 0.3
    near_radius: float = 5.0
    collision_step: float = 0.25
    apron_factor: float = 1.5

    def __post_init__(self):
        object.__setattr__(self, "step_sizes", tuple(float(s) for s in self.step_sizes))
        if self.steer_samples < 3:
            raise ValueError("steer_samples must be at least 3")
        positives = (self.max_iterations, self.angle_resolution, self.xy_resolution,
                     self.collision_step, self.apron_factor, *self.step_sizes)
        if any(v <= 0 for v in positives):
            raise ValueError("planner parameters must be positive")
        if min(self.reverse_surcharge, self.gear_switch_penalty, self.heading_weight_near,
               self.heading_weight_far, self.near_radius) < 0:
            raise ValueError("cost weights must be non-negative")

    def steering_angles(self, spec: VehicleSpec) -> np.ndarray:
        return np.linspace(-spec.max_steer, spec.max_steer, self.steer_samples)

    def sampling(self) -> tuple[np.ndarray, np.ndarray]:
        """Check distances along a primitive and the step index ending at each."""
        longest = max(self.step_sizes)
        n = int(math.ceil(longest / self.collision_step - 1e-9))
        dists = {round(longest * (k + 1) / n, 12) for k in range(n)}
        dists |= {round(s, 12) for s in self.step_sizes}
        # keep spacing <= collision_step before every step endpoint too
        s_sorted = sorted(dists)
        steps = {round(s, 12): i for i, s in enumerate(self.step_sizes)}
        idx = np.array([steps.get(s, -1) for s in s_sorted], dtype=np.int64)
        return np.array(s_sorted, dtype=np.float64), idx


@dataclass(frozen=True)
class Waypoint:
    pose: Pose
    gear: str
    steer: float = 0.0
    length: float = 0.0


@dataclass(frozen=True)
class Path:
    """Waypoints from start to goal; each is reached from its predecessor by one
    primitive of the recorded ``gear``, ``steer`` and ``length``."""

    waypoints: tuple[Waypoint, ...]
    cost: float
    expansions: int = 0

    def samples(self, spec: VehicleSpec, ds: float = 0.25) -> list[Pose]:
        """Dense poses along the path (start included), spaced at most ``ds``."""
        out = [self.waypoints[0].pose]
        for prev, wp in zip(self.waypoints, self.waypoints[1:]):
            d = 1 if wp.gear == "F" else -1
            pts = K.sample_primitive(prev.pose.x, prev.pose.y, prev.pose.theta, d, wp.steer,
                                     wp.length, spec.wheelbase, ds)
            out.extend(Pose(*map(float, row)) for row in pts)
        return out

    def reversed(self) -> "Path":
        """Time reversal with mirrored gears: a parking maneuver from an exit one."""
        flip = {"F": "R", "R": "F"}
        wps = self.waypoints
        out = [Waypoint(wps[-1].pose, flip[wps[-1].gear])]
        for i in range(len(wps) - 1, 0, -1):
            out.append(Waypoint(wps[i - 1].pose, flip[wps[i].gear], wps[i].steer, wps[i].length))
        return Path(tuple(out), self.cost, self.expansions)

    def to_json(self) -> dict:
        return {
            "cost": self.cost,
            "waypoints": [{"x": w.pose.x, "y": w.pose.y, "theta": w.pose.theta,
                           "gear": w.gear, "steer": w.steer, "length": w.length}
                          for w in self.waypoints],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Path":
        return cls(tuple(Waypoint(Pose(w["x"], w["y"], w["theta"]), w["gear"],
                                  w.get("steer", 0.0), w.get("length", 0.0))
                         for w in data["waypoints"]), data["cost"])


@dataclass(frozen=True)
class GoalRegion:
    """Poses whose footprint lies entirely beyond one entrance segment.

    Outside the lot the planner may use a free apron that extends
    ``apron_factor * vehicle length`` beyond the entrance, outward and along
    the boundary on both sides.
    """

    lot: LotSpec
    entrance: EntranceSegment
    depth: float

    @classmethod
    def for_entrance(cls, lot: LotSpec, entrance: EntranceSegment, spec: VehicleSpec,
                     params: PlannerParams = PlannerParams()) -> "GoalRegion":
        return cls(lot, entrance, params.apron_factor * spec.length)

    @property
    def normal(self) -> tuple[float, float]:
        return {"left": (-1.0, 0.0), "right": (1.0, 0.0),
                "bottom": (0.0, -1.0), "top": (0.0, 1.0)}[self.entrance.side]

    @property
    def offset(self) -> float:
        side = self.entrance.side
        if side == "right":
            return self.lot.length_L
        if side == "top":
            return self.lot.width_W
        return 0.0

    @property
    def heading(self) -> float:
        nx, ny = self.normal
        return math.atan2(ny, nx)

    def apron_box(self) -> tuple[float, float, float, float]:
        lo, hi = self.entrance.span
        D, L, W = self.depth, self.lot.length_L, self.lot.width_W
        return {
            "left": (-D, lo - D, 0.0, hi + D),
            "right": (L, lo - D, L + D, hi + D),
            "bottom": (lo - D, -D, hi + D, 0.0),
            "top": (lo - D, W, hi + D, W + D),
        }[self.entrance.side]

    @property
    def center(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.apron_box()
        return (x0 + x1) / 2.0, (y0 + y1) / 2.0

    @property
    def radius(self) -> float:
        x0, y0, x1, y1 = self.apron_box()
        return 0.5 * math.hypot(x1 - x0, y1 - y0)

    def boxes(self) -> np.ndarray:
        return np.array([(0.0, 0.0, self.lot.length_L, self.lot.width_W), self.apron_box()],
                        dtype=np.float64)

    def walls(self) -> np.ndarray:
        segs = list(self.lot.wall_segments())
        for other in self.lot.entrances:
            if other != self.entrance:
                segs.append(self.lot.side_points(other.side, *other.span))
        return np.array(segs, dtype=np.float64).reshape(-1, 2, 2)

    def contains(self, pose: Pose, spec: VehicleSpec) -> bool:
        nx, ny = self.normal
        return all(cx * nx + cy * ny > self.offset + K.TOL
                   for cx, cy in footprint(pose, spec).corners())


def _vehicle_array(spec: VehicleSpec) -> np.ndarray:
    return np.array([spec.wheelbase + spec.front_overhang, spec.rear_overhang,
                     spec.width / 2.0, spec.wheelbase], dtype=np.float64)


def _obstacle_arrays(obstacles: Sequence[OrientedRect]):
    corners = np.array([r.corners() for r in obstacles], dtype=np.float64).reshape(-1, 4, 2)
    circ = np.array([(*r.center, math.hypot(r.half_width, r.half_length)) for r in obstacles],
                    dtype=np.float64).reshape(-1, 3)
    return corners, circ


def _grid(boxes: np.ndarray, params: PlannerParams) -> np.ndarray:
    x0, y0 = boxes[:, 0].min(), boxes[:, 1].min()
    x1, y1 = boxes[:, 2].max(), boxes[:, 3].max()
    nx = int(math.ceil((x1 - x0) / params.xy_resolution)) + 1
    ny = int(math.ceil((y1 - y0) / params.xy_resolution)) + 1
    nth = int(round(2.0 * math.pi / params.angle_resolution))
    ang = 2.0 * math.pi / nth
    return np.array([x0, y0, params.xy_resolution, ang, nx, ny, nth], dtype=np.float64)


@dataclass
class SearchResult:
    status: str  # "found" | "exhausted" | "iteration_cap"
    path: Optional[Path]
    expansions: int


def search(starts: Sequence[Pose], goal: GoalRegion, spec: VehicleSpec,
           obstacles: Sequence[OrientedRect], params: PlannerParams = PlannerParams()
           ) -> SearchResult:
    """Run the search from any of ``starts`` and report how it ended."""
    boxes = goal.boxes()
    walls = goal.walls()
    obs, circ = _obstacle_arrays(list(obstacles))
    s_arr, s_idx = params.sampling()
    nx, ny = goal.normal
    starts_arr = np.array([(p.x, p.y, p.theta) for p in starts], dtype=np.float64).reshape(-1, 3)
    status, raw, cost, expansions = K.hybrid_astar(
        starts_arr, _vehicle_array(spec), obs, circ, walls, boxes,
        np.array([nx, ny, goal.offset], dtype=np.float64),
        np.array([*goal.center, goal.heading], dtype=np.float64),
        np.array([params.heading_weight_near, params.heading_weight_far, params.near_radius],
                 dtype=np.float64),
        params.steering_angles(spec), s_arr, s_idx, len(params.step_sizes),
        np.array([params.reverse_surcharge, params.gear_switch_penalty], dtype=np.float64),
        _grid(boxes, params), int(params.max_iterations))
    if status != 1:
        return SearchResult("iteration_cap" if status == 2 else "exhausted", None,
                            int(expansions))
    wps = []
    for i, row in enumerate(raw):
        gear = int(row[3])
        if i == 0:
            gear = int(raw[1][3]) if len(raw) > 1 else 1
        wps.append(Waypoint(Pose(float(row[0]), float(row[1]), float(row[2])),
                            GEAR_CODES[gear], float(row[4]), float(row[5])))
    return SearchResult("found", Path(tuple(wps), float(cost), int(expansions)),
                        int(expansions))


def plan(start: Pose | Sequence[Pose], goal: GoalRegion, spec: VehicleSpec,
         obstacles: Sequence[OrientedRect], lot: Optional[LotSpec] = None,
         params: PlannerParams = PlannerParams()) -> Optional[Path]:
    """Collision-free, kinematically feasible path into ``goal``, or None.

    ``lot`` is accepted for signature symmetry; the goal region already
    carries it.
    """
    if lot is not None and lot != goal.lot:
        raise ValueError("goal region belongs to a different lot")
    starts = [start] if isinstance(start, Pose) else list(start)
    return search(starts, goal, spec, obstacles, params).path


def parked_vehicle(layout: Layout, i: int, spec: VehicleSpec) -> OrientedRect:
    """Body of a vehicle parked in the center of stall ``i``."""
    cx, cy = layout.center(i)
    theta = 0.0 if layout.stalls[i].orient == "L" else math.pi / 2.0
    return OrientedRect((cx, cy), spec.width / 2.0, spec.length / 2.0, theta)


def parked_poses(layout: Layout, i: int, spec: VehicleSpec) -> list[Pose]:
    """Both rear-axle poses of a vehicle centered in stall ``i`` along its long axis."""
    cx, cy = layout.center(i)
    base = 0.0 if layout.stalls[i].orient == "L" else math.pi / 2.0
    offset = (spec.wheelbase + spec.front_overhang - spec.rear_overhang) / 2.0
    out = []
    for th in (base, base + math.pi):
        c, s = math.cos(th), math.sin(th)
        out.append(Pose(cx - offset * c, cy - offset * s, th))
    return out


def resolve_entrance(lot: LotSpec, e) -> EntranceSegment:
    """Accept an entrance index, an ``"e<k>"`` id or a segment."""
    if isinstance(e, EntranceSegment):
        if e not in lot.entrances:
            raise KeyError(f"entrance {e} is not part of the lot")
        return e
    k = int(e[1:]) if isinstance(e, str) else int(e)
    if not 0 <= k < len(lot.entrances):
        raise KeyError(f"unknown entrance {e!r}")
    return lot.entrances[k]


def stall_exit_query(p: int, e, occupied: Iterable[int], layout: Layout, lot: LotSpec,
                     spec: VehicleSpec, params: PlannerParams = PlannerParams()
                     ) -> Optional[Path]:
    """Exit maneuver from stall ``p`` through entrance ``e`` with ``occupied`` stalls parked."""
    occupied = set(occupied)
    if not 0 <= p < layout.capacity:
        raise UnknownStall(p)
    unknown = occupied - set(range(layout.capacity))
    if unknown:
        raise UnknownStall(min(unknown))
    if p in occupied:
        raise OccupiedStart(p)
    goal = GoalRegion.for_entrance(lot, resolve_entrance(lot, e), spec, params)
    obstacles = [parked_vehicle(layout, i, spec) for i in sorted(occupied)]
    return search(parked_poses(layout, p, spec), goal, spec, obstacles, params).path
