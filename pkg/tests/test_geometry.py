import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from valetplan.geometry import (DEFAULT_VEHICLE, EntranceSegment, LotSpec, OrientedRect, Pose,
                                VehicleSpec, footprint, normalize_angle, pose_collision_free,
                                rects_intersect, segment_intersects_rect)
from valetplan.planner import _kernels as K
from valetplan.planner.hybrid_astar import _vehicle_array

coord = st.floats(-10, 10, allow_nan=False)
half = st.floats(0.2, 5, allow_nan=False)
angle = st.floats(-7, 7, allow_nan=False)
rects = st.builds(lambda x, y, w, l, t: OrientedRect((x, y), w, l, t), coord, coord, half, half, angle)


# ---------------------------------------------------------------------------
# independent oracle: convex polygons intersect iff a vertex of one lies in
# the other or two edges cross (orientation predicates, no projections)

def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _inside(pt, poly):
    signs = [_cross(poly[i], poly[(i + 1) % len(poly)], pt) for i in range(len(poly))]
    return all(s >= 0 for s in signs) or all(s <= 0 for s in signs)


def _on_segment(p, q, r):
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def _segments_cross(p1, p2, q1, q2):
    d1, d2 = _cross(q1, q2, p1), _cross(q1, q2, p2)
    d3, d4 = _cross(p1, p2, q1), _cross(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    return ((d1 == 0 and _on_segment(q1, q2, p1)) or (d2 == 0 and _on_segment(q1, q2, p2))
            or (d3 == 0 and _on_segment(p1, p2, q1)) or (d4 == 0 and _on_segment(p1, p2, q2)))


def oracle_intersect(a, b):
    if any(_inside(v, b) for v in a) or any(_inside(v, a) for v in b):
        return True
    return any(_segments_cross(a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4])
               for i in range(4) for j in range(4))


def _scaled(r, d):
    return OrientedRect(r.center, r.half_width + d, r.half_length + d, r.theta)


@settings(max_examples=400, deadline=None)
@given(rects, rects)
def test_sat_matches_polygon_oracle(r1, r2):
    # skip near-tangent pairs, where the answer hinges on rounding
    grown = oracle_intersect(_scaled(r1, 1e-6).corners(), r2.corners())
    shrunk = oracle_intersect(_scaled(r1, -1e-6).corners(), r2.corners())
    assume(grown == shrunk)
    assert rects_intersect(r1, r2) == grown
    assert rects_intersect(r2, r1) == grown


@settings(max_examples=200, deadline=None)
@given(rects, rects)
def test_kernel_sat_agrees_with_plain_version(r1, r2):
    a = np.array(r1.corners())
    b = np.array(r2.corners())
    assert K.polygons_intersect(a, 4, b, 4, K.TOL) == rects_intersect(r1, r2)


def test_touching_boxes_collide():
    a = OrientedRect.from_box(0, 0, 3, 9.5)
    b = OrientedRect.from_box(3, 0, 6, 9.5)
    c = OrientedRect.from_box(3.001, 0, 6, 9.5)
    assert rects_intersect(a, b)
    assert not rects_intersect(a, c)


def test_segment_rect():
    r = OrientedRect.from_box(0, 0, 2, 1)
    assert segment_intersects_rect((-1, 0.5), (3, 0.5), r)
    assert segment_intersects_rect((2, -1), (2, 2), r)  # along an edge
    assert not segment_intersects_rect((-1, 2), (3, 2.5), r)


@given(st.floats(-100, 100, allow_nan=False))
def test_normalize_angle_range_and_equivalence(t):
    n = normalize_angle(t)
    assert -math.pi <= n < math.pi
    assert math.isclose(math.cos(n), math.cos(t), abs_tol=1e-9)
    assert math.isclose(math.sin(n), math.sin(t), abs_tol=1e-9)


def test_normalize_angle_at_pi():
    assert normalize_angle(math.pi) == -math.pi
    assert normalize_angle(-math.pi) == -math.pi


def test_footprint_extents():
    fp = footprint(Pose(0, 0, 0), DEFAULT_VEHICLE)
    x0, y0, x1, y1 = fp.bounds()
    # the body runs from the rear overhang behind the axle to wheelbase + front ahead
    assert x0 == pytest.approx(-2.875)
    assert x1 == pytest.approx(4.240 + 1.885)
    assert (y0, y1) == (pytest.approx(-1.25), pytest.approx(1.25))


@settings(max_examples=100)
@given(coord, coord, angle)
def test_kernel_footprint_matches(x, y, th):
    out = np.empty((4, 2))
    K.footprint_corners(x, y, th, _vehicle_array(DEFAULT_VEHICLE), out)
    expect = footprint(Pose(x, y, th), DEFAULT_VEHICLE).corners()
    got = sorted(map(tuple, np.round(out, 9)))
    assert got == sorted((round(a, 9) + 0.0, round(b, 9) + 0.0) for a, b in expect)


def test_vehicle_spec_checks_lengths():
    with pytest.raises(ValueError):
        VehicleSpec(2.5, 9.0, 4.0, 1.885, 2.875, 0.5)
    with pytest.raises(ValueError):
        VehicleSpec(2.5, 9.0, 4.240, 1.885, 2.875, 0.0)
    assert DEFAULT_VEHICLE.min_turning_radius == pytest.approx(4.240 / math.tan(math.pi / 6))


def test_lot_rejects_bad_entrances():
    with pytest.raises(ValueError):
        LotSpec(12, 15, (EntranceSegment("left", (0, 13)),))
    with pytest.raises(ValueError):
        LotSpec(12, 15, (EntranceSegment("left", (0, 6)), EntranceSegment("left", (5, 12))))
    with pytest.raises(ValueError):
        EntranceSegment("front", (0, 1))
    with pytest.raises(ValueError):
        EntranceSegment("left", (3, 3))


def test_wall_segments_leave_entrance_open():
    lot = LotSpec(12, 15, (EntranceSegment("left", (2, 8)),))
    walls = lot.wall_segments()
    assert ((0.0, 0.0), (0.0, 2)) in walls
    assert ((0.0, 8), (0.0, 12)) in walls
    assert not any(p == (0.0, 2) and q == (0.0, 8) for p, q in walls)
    assert len(walls) == 5  # two left pieces plus three full sides


def test_pose_collision_free_walls_and_obstacles():
    lot = LotSpec.with_left_entrance(15, 12)
    inside = Pose(5, 6, 0)
    assert pose_collision_free(inside, DEFAULT_VEHICLE, [], lot)
    # poking through the right wall
    assert not pose_collision_free(Pose(12, 6, 0), DEFAULT_VEHICLE, [], lot)
    # straddling the open entrance is allowed
    assert pose_collision_free(Pose(1, 6, 0), DEFAULT_VEHICLE, [], lot)
    ob = OrientedRect.from_box(4, 5, 6, 7)
    assert not pose_collision_free(inside, DEFAULT_VEHICLE, [ob], lot)
