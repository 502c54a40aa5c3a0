"""Hot loops of the Hybrid A* search.

Written in the numba-compatible subset of Python/numpy; :mod:`valetplan._accel`
decides whether they are compiled. Arrays in, arrays out; no Python objects.

Array conventions
-----------------
vehicle   : [ahead, rear, half_width, wheelbase] where ``ahead`` is the distance
            from the rear axle to the front bumper.
obstacles : (K, 4, 2) rectangle corners, CCW.
obs_circ  : (K, 3) bounding circles (cx, cy, r) for quick rejection.
walls     : (M, 2, 2) segment endpoints.
boxes     : (B, 4) axis-aligned [x0, y0, x1, y1]; every footprint corner must
            lie in one of them.
"""

import heapq
import math

import numpy as np

from .._accel import njit

TOL = 1e-9
TWO_PI = 2.0 * math.pi


@njit
def wrap_angle(t):
    r = (t + math.pi) % TWO_PI - math.pi
    if r >= math.pi:
        r -= TWO_PI
    return r


@njit
def footprint_corners(x, y, th, vehicle, out):
    """Fill ``out`` (4, 2) with CCW body corners for rear-axle pose (x, y, th)."""
    ahead = vehicle[0]
    rear = vehicle[1]
    hw = vehicle[2]
    c = math.cos(th)
    s = math.sin(th)
    fx, fy = x + ahead * c, y + ahead * s
    bx, by = x - rear * c, y - rear * s
    nx, ny = -s * hw, c * hw
    out[0, 0] = fx - nx
    out[0, 1] = fy - ny
    out[1, 0] = fx + nx
    out[1, 1] = fy + ny
    out[2, 0] = bx + nx
    out[2, 1] = by + ny
    out[3, 0] = bx - nx
    out[3, 1] = by - ny


@njit
def _separated_on(ax, ay, pa, na, pb, nb, tol):
    amin = 1e300
    amax = -1e300
    for i in range(na):
        v = pa[i, 0] * ax + pa[i, 1] * ay
        if v < amin:
            amin = v
        if v > amax:
            amax = v
    bmin = 1e300
    bmax = -1e300
    for i in range(nb):
        v = pb[i, 0] * ax + pb[i, 1] * ay
        if v < bmin:
            bmin = v
        if v > bmax:
            bmax = v
    return bmin - amax > tol or amin - bmax > tol


@njit
def polygons_intersect(pa, na, pb, nb, tol):
    """SAT for two convex polygons given as CCW vertex arrays (na, nb <= 4).

    A two-point "polygon" is a segment; its own axes are its direction and
    normal. Touching counts as intersecting.
    """
    for k in range(2):
        p = pa if k == 0 else pb
        n = na if k == 0 else nb
        m = n if n > 2 else 1
        for i in range(m):
            j = (i + 1) % n
            ex = p[j, 0] - p[i, 0]
            ey = p[j, 1] - p[i, 1]
            norm = math.sqrt(ex * ex + ey * ey)
            if norm == 0.0:
                continue
            if _separated_on(-ey / norm, ex / norm, pa, na, pb, nb, tol):
                return False
            if n == 2 and _separated_on(ex / norm, ey / norm, pa, na, pb, nb, tol):
                return False
    return True


@njit
def corners_collide(corners, obstacles, obs_circ, walls, boxes, radius):
    """True if the footprint polygon leaves the world or hits anything."""
    for i in range(4):
        px = corners[i, 0]
        py = corners[i, 1]
        inside = False
        for b in range(boxes.shape[0]):
            if (boxes[b, 0] - TOL <= px <= boxes[b, 2] + TOL
                    and boxes[b, 1] - TOL <= py <= boxes[b, 3] + TOL):
                inside = True
                break
        if not inside:
            return True
    cx = 0.25 * (corners[0, 0] + corners[1, 0] + corners[2, 0] + corners[3, 0])
    cy = 0.25 * (corners[0, 1] + corners[1, 1] + corners[2, 1] + corners[3, 1])
    for k in range(obstacles.shape[0]):
        dx = cx - obs_circ[k, 0]
        dy = cy - obs_circ[k, 1]
        reach = radius + obs_circ[k, 2] + TOL
        if dx * dx + dy * dy > reach * reach:
            continue
        if polygons_intersect(corners, 4, obstacles[k], 4, TOL):
            return True
    for k in range(walls.shape[0]):
        if polygons_intersect(corners, 4, walls[k], 2, TOL):
            return True
    return False


@njit
def pose_collides(x, y, th, vehicle, obstacles, obs_circ, walls, boxes):
    corners = np.empty((4, 2))
    footprint_corners(x, y, th, vehicle, corners)
    radius = 0.5 * math.sqrt((vehicle[0] + vehicle[1]) ** 2 + 4.0 * vehicle[2] ** 2)
    return corners_collide(corners, obstacles, obs_circ, walls, boxes, radius)


@njit
def advance(x, y, th, dist, curvature):
    """Exact bicycle-model arc of signed length ``dist`` from a rear-axle pose."""
    if abs(curvature) < 1e-12:
        return x + dist * math.cos(th), y + dist * math.sin(th), th
    th2 = th + dist * curvature
    nx = x + (math.sin(th2) - math.sin(th)) / curvature
    ny = y + (math.cos(th) - math.cos(th2)) / curvature
    return nx, ny, th2


@njit
def goal_reached(corners, goal):
    """goal = [nx, ny, offset]: all corners strictly beyond the entrance line."""
    for i in range(4):
        if corners[i, 0] * goal[0] + corners[i, 1] * goal[1] <= goal[2] + TOL:
            return False
    return True


@njit
def heuristic(x, y, th, target, weights):
    """target = [gx, gy, gth]; weights = [w_near, w_far, near_radius]."""
    dx = x - target[0]
    dy = y - target[1]
    d = math.sqrt(dx * dx + dy * dy)
    w = weights[0] if d < weights[2] else weights[1]
    return d + w * abs(wrap_angle(th - target[2]))


@njit
def _cell(x, y, th, grid):
    """grid = [x0, y0, xy_res, ang_res, nx, ny, nth] -> flat index or -1."""
    ix = int(math.floor((x - grid[0]) / grid[2]))
    iy = int(math.floor((y - grid[1]) / grid[2]))
    nx = int(grid[4])
    ny = int(grid[5])
    nth = int(grid[6])
    if ix < 0 or iy < 0 or ix >= nx or iy >= ny:
        return -1
    it = int(math.floor((wrap_angle(th) + math.pi) / grid[3])) % nth
    return (it * ny + iy) * nx + ix


@njit
def _grow(a, n):
    out = np.empty(n, a.dtype)
    out[: a.shape[0]] = a
    return out


@njit
def hybrid_astar(starts, vehicle, obstacles, obs_circ, walls, boxes, goal, target,
                 weights, steers, sample_s, sample_step, n_steps, costs, grid,
                 max_iterations):
    """Grid-pruned A* over continuous rear-axle poses.

    sample_s / sample_step : distances along a primitive at which footprints
        are checked, and the index of the step size ending there (-1 if none).
    costs : [reverse_surcharge, gear_switch_penalty].

    Returns (status, path (P, 6) = x, y, th, gear, steer, length, cost,
    expansions). status 1 = found, 0 = exhausted, 2 = iteration cap hit.
    """
    ncell = int(grid[4]) * int(grid[5]) * int(grid[6])
    closed = np.zeros(ncell, np.uint8)
    best_g = np.full(ncell, np.inf)
    radius = 0.5 * math.sqrt((vehicle[0] + vehicle[1]) ** 2 + 4.0 * vehicle[2] ** 2)

    cap = 4096
    px = np.empty(cap)
    py = np.empty(cap)
    pth = np.empty(cap)
    pg = np.empty(cap)
    parent = np.empty(cap, np.int64)
    gear = np.empty(cap, np.int64)
    psteer = np.empty(cap)
    plen = np.empty(cap)
    count = 0
    pushes = 0
    heap = [(0.0, np.int64(0), np.int64(0))]
    heap.pop()

    corners = np.empty((4, 2))
    goal_node = -1
    for k in range(starts.shape[0]):
        sx, sy, sth = starts[k, 0], starts[k, 1], wrap_angle(starts[k, 2])
        footprint_corners(sx, sy, sth, vehicle, corners)
        if corners_collide(corners, obstacles, obs_circ, walls, boxes, radius):
            continue
        c = _cell(sx, sy, sth, grid)
        if c < 0 or best_g[c] <= 0.0:
            continue
        best_g[c] = 0.0
        px[count] = sx
        py[count] = sy
        pth[count] = sth
        pg[count] = 0.0
        parent[count] = -1
        gear[count] = 0
        psteer[count] = 0.0
        plen[count] = 0.0
        if goal_reached(corners, goal):
            goal_node = count
            count += 1
            break
        heapq.heappush(heap, (heuristic(sx, sy, sth, target, weights), np.int64(pushes),
                              np.int64(count)))
        pushes += 1
        count += 1

    wb = vehicle[3]
    expansions = 0
    status = 0
    while goal_node < 0 and len(heap) > 0:
        item = heapq.heappop(heap)
        cur = item[2]
        c = _cell(px[cur], py[cur], pth[cur], grid)
        if closed[c] == 1:
            continue
        if pg[cur] > best_g[c]:
            continue
        closed[c] = 1
        if expansions >= max_iterations:
            status = 2
            break
        expansions += 1
        x0 = px[cur]
        y0 = py[cur]
        th0 = pth[cur]
        g0 = pg[cur]
        gear0 = gear[cur]
        for gi in range(2):
            direction = 1 if gi == 0 else -1
            for si in range(steers.shape[0]):
                kappa = math.tan(steers[si]) / wb
                for k in range(sample_s.shape[0]):
                    d = direction * sample_s[k]
                    nx, ny, nth = advance(x0, y0, th0, d, kappa)
                    footprint_corners(nx, ny, nth, vehicle, corners)
                    if corners_collide(corners, obstacles, obs_circ, walls, boxes, radius):
                        break
                    step = sample_step[k]
                    if step < 0:
                        continue
                    nth = wrap_angle(nth)
                    g = g0 + sample_s[k] * (1.0 + (costs[0] if direction < 0 else 0.0))
                    if gear0 != 0 and gear0 != direction:
                        g += costs[1]
                    reached = goal_reached(corners, goal)
                    cc = _cell(nx, ny, nth, grid)
                    if not reached:
                        if cc < 0 or closed[cc] == 1 or g >= best_g[cc] - 1e-12:
                            continue
                        best_g[cc] = g
                    if count >= cap:
                        cap *= 2
                        px = _grow(px, cap)
                        py = _grow(py, cap)
                        pth = _grow(pth, cap)
                        pg = _grow(pg, cap)
                        parent = _grow(parent, cap)
                        gear = _grow(gear, cap)
                        psteer = _grow(psteer, cap)
                        plen = _grow(plen, cap)
                    px[count] = nx
                    py[count] = ny
                    pth[count] = nth
                    pg[count] = g
                    parent[count] = cur
                    gear[count] = direction
                    psteer[count] = steers[si]
                    plen[count] = sample_s[k]
                    if reached:
                        goal_node = count
                        count += 1
                        break
                    heapq.heappush(heap, (g + heuristic(nx, ny, nth, target, weights),
                                          np.int64(pushes), np.int64(count)))
                    pushes += 1
                    count += 1
                if goal_node >= 0:
                    break
            if goal_node >= 0:
                break

    if goal_node < 0:
        return status, np.empty((0, 6)), np.inf, expansions

    n = 0
    k = goal_node
    while k >= 0:
        n += 1
        k = parent[k]
    path = np.empty((n, 6))
    k = goal_node
    for i in range(n - 1, -1, -1):
        path[i, 0] = px[k]
        path[i, 1] = py[k]
        path[i, 2] = pth[k]
        path[i, 3] = gear[k]
        path[i, 4] = psteer[k]
        path[i, 5] = plen[k]
        k = parent[k]
    return 1, path, pg[goal_node], expansions


@njit
def sample_primitive(x, y, th, direction, steer, length, wheelbase, ds):
    """Poses every <= ds along one primitive, excluding the start pose."""
    n = max(1, int(math.ceil(length / ds - 1e-9)))
    out = np.empty((n, 3))
    kappa = math.tan(steer) / wheelbase
    for i in range(n):
        s = length * (i + 1) / n
        out[i, 0], out[i, 1], out[i, 2] = advance(x, y, th, direction * s, kappa)
    return out
