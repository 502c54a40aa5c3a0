"""Maximum-capacity stall placement and deduplication into unique layouts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .geometry import EntranceSegment, LotSpec, OrientedRect  # noqa: F401  (re-export)

EPS = 1e-9
KEY_DIGITS = 6


class NoFit(ValueError):
    """The stall fits in the lot in neither orientation."""


@dataclass(frozen=True)
class Stall:
    """A stall with lower-left corner ``(x, y)``.

    ``orient`` is ``"L"`` when the long side runs along the lot length (x axis)
    and ``"W"`` when it runs along the lot width (y axis).
    """

    index: int
    x: float
    y: float
    orient: str

    def __post_init__(self):
        if self.orient not in ("L", "W"):
            raise ValueError(f"bad orientation {self.orient!r}")

    @property
    def origin(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Layout:
    stalls: tuple[Stall, ...]
    stall_w: float
    stall_l: float

    def __post_init__(self):
        object.__setattr__(self, "stalls", tuple(self.stalls))
        if [s.index for s in self.stalls] != list(range(len(self.stalls))):
            raise ValueError("stall indices must be 0..n-1 in order")

    @property
    def capacity(self) -> int:
        return len(self.stalls)

    def dims(self, orient: str) -> tuple[float, float]:
        """(extent along x, extent along y) of a stall with this orientation."""
        if orient == "L":
            return self.stall_l, self.stall_w
        return self.stall_w, self.stall_l

    def box(self, i: int) -> tuple[float, float, float, float]:
        s = self.stalls[i]
        dx, dy = self.dims(s.orient)
        return s.x, s.y, s.x + dx, s.y + dy

    def center(self, i: int) -> tuple[float, float]:
        x0, y0, x1, y1 = self.box(i)
        return (x0 + x1) / 2.0, (y0 + y1) / 2.0

    def rect(self, i: int) -> OrientedRect:
        return OrientedRect.from_box(*self.box(i))

    def key(self) -> tuple:
        return tuple((round(s.y, KEY_DIGITS), round(s.x, KEY_DIGITS), s.orient)
                     for s in sorted(self.stalls, key=_stall_order))

    def translated(self, dx: float, dy: float) -> "Layout":
        return Layout(tuple(Stall(s.index, s.x + dx, s.y + dy, s.orient) for s in self.stalls),
                      self.stall_w, self.stall_l)


def _stall_order(s: Stall):
    return (round(s.y, KEY_DIGITS), round(s.x, KEY_DIGITS), s.orient)


def make_layout(placements: Iterable[tuple[float, float, str]], stall_w: float,
                stall_l: float) -> Layout:
    """Build a layout from ``(x, y, orient)`` triples, indexing by (y, x)."""
    tmp = [Stall(0, x, y, o) for x, y, o in placements]
    tmp.sort(key=_stall_order)
    return Layout(tuple(Stall(i, s.x, s.y, s.orient) for i, s in enumerate(tmp)),
                  stall_w, stall_l)


def boxes_overlap(a, b, eps: float = EPS) -> bool:
    """Positive-area overlap of two axis-aligned boxes."""
    return (min(a[2], b[2]) - max(a[0], b[0]) > eps
            and min(a[3], b[3]) - max(a[1], b[1]) > eps)


def candidate_coords(extent: float, size: float, steps: tuple[float, float]) -> list[float]:
    """Subset sums of ``steps`` at which a piece of ``size`` still fits in ``extent``."""
    limit = extent - size + EPS
    a, b = steps
    out = set()
    i = 0
    while i * a <= limit:
        j = 0
        while i * a + j * b <= limit:
            out.add(round(i * a + j * b, 12))
            j += 1
        i += 1
    return sorted(out)


def _candidate_placements(lot: LotSpec, stall_w: float, stall_l: float):
    steps = (stall_w, stall_l)
    out = []
    for orient in ("L", "W"):
        dx, dy = (stall_l, stall_w) if orient == "L" else (stall_w, stall_l)
        if dx > lot.length_L + EPS or dy > lot.width_W + EPS:
            continue
        for y in candidate_coords(lot.width_W, dy, steps):
            for x in candidate_coords(lot.length_L, dx, steps):
                out.append((x, y, orient, (x, y, x + dx, y + dy)))
    out.sort(key=lambda p: (p[1], p[0], p[2]))
    return out


def _cell_masks(boxes):
    """Bitmask of elementary grid cells covered by each box, plus cell areas."""
    xs = sorted({round(v, 9) for b in boxes for v in (b[0], b[2])})
    ys = sorted({round(v, 9) for b in boxes for v in (b[1], b[3])})
    nx = len(xs) - 1
    areas = [(xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]) for j in range(len(ys) - 1)
             for i in range(nx)]
    masks = []
    for b in boxes:
        i0, i1 = xs.index(round(b[0], 9)), xs.index(round(b[2], 9))
        j0, j1 = ys.index(round(b[1], 9)), ys.index(round(b[3], 9))
        m = 0
        for j in range(j0, j1):
            for i in range(i0, i1):
                m |= 1 << (j * nx + i)
        masks.append(m)
    return masks, areas


def _mask_area(mask: int, areas: list[float]) -> float:
    total = 0.0
    while mask:
        low = mask & -mask
        total += areas[low.bit_length() - 1]
        mask ^= low
    return total


def solve_max_packing(lot: LotSpec, stall_w: float, stall_l: float) -> list[Layout]:
    """All maximum-cardinality stall packings with origins on the candidate grid.

    Exact branch and bound over the placements whose coordinates are subset
    sums of the two stall sides. A packing of identical rectangles can always
    be shifted onto this grid without losing stalls, so the optimum is exact.
    The bound is the area of the cells still coverable by compatible
    candidates divided by the stall area.
    """
    cands = _candidate_placements(lot, stall_w, stall_l)
    if not cands:
        raise NoFit(f"stall {stall_w}x{stall_l} does not fit in lot "
                    f"{lot.length_L}x{lot.width_W}")
    masks, areas = _cell_masks([c[3] for c in cands])
    unit = stall_w * stall_l
    best = [0]
    found: list[tuple[int, ...]] = []

    def search(chosen: list[int], avail: list[int]):
        if not avail:
            if len(chosen) > best[0]:
                best[0] = len(chosen)
                found.clear()
            if len(chosen) == best[0]:
                found.append(tuple(chosen))
            return
        union = 0
        for j in avail:
            union |= masks[j]
        bound = len(chosen) + math.floor(_mask_area(union, areas) / unit + 1e-9)
        if bound < best[0]:
            return
        i, rest = avail[0], avail[1:]
        chosen.append(i)
        search(chosen, [j for j in rest if not masks[j] & masks[i]])
        chosen.pop()
        search(chosen, rest)

    search([], list(range(len(cands))))
    layouts = [make_layout([cands[i][:3] for i in combo], stall_w, stall_l) for combo in found]
    layouts.sort(key=Layout.key)
    return layouts


def compact(layout: Layout) -> Layout:
    """Push every stall down, then left, repeating until nothing moves."""
    pos = [[s.x, s.y, s.orient] for s in layout.stalls]
    dims = [layout.dims(s.orient) for s in layout.stalls]
    n = len(pos)

    def slide(axis: int) -> bool:
        moved = False
        other = 1 - axis
        for i in sorted(range(n), key=lambda k: (pos[k][axis], pos[k][other])):
            lo_i, hi_i = pos[i][other], pos[i][other] + dims[i][other]
            start = pos[i][axis]
            stop = 0.0
            for j in range(n):
                if j == i:
                    continue
                lo_j, hi_j = pos[j][other], pos[j][other] + dims[j][other]
                if min(hi_i, hi_j) - max(lo_i, lo_j) <= EPS:
                    continue
                end_j = pos[j][axis] + dims[j][axis]
                if end_j <= start + EPS:
                    stop = max(stop, end_j)
            if start - stop > EPS:
                pos[i][axis] = round(stop, 12)
                moved = True
        return moved

    while True:
        down = slide(1)
        left = slide(0)
        if not (down or left):
            break
    return make_layout([tuple(p) for p in pos], layout.stall_w, layout.stall_l)


def canonicalize_unique(layouts: Iterable[Layout]) -> list[Layout]:
    """Unique layouts after bottom-left compaction, ordered by canonical key."""
    layouts = list(layouts)
    if len({lay.capacity for lay in layouts}) > 1:
        raise ValueError("all layouts must share the same capacity")
    unique: dict[tuple, Layout] = {}
    for lay in layouts:
        c = compact(lay)
        unique.setdefault(c.key(), c)
    return [unique[k] for k in sorted(unique)]


def validate_layout(layout: Layout, lot: LotSpec) -> None:
    """Raise ValueError unless stalls are inside the lot and interior-disjoint."""
    boxes = [layout.box(i) for i in range(layout.capacity)]
    for b in boxes:
        if b[0] < -EPS or b[1] < -EPS or b[2] > lot.length_L + EPS or b[3] > lot.width_W + EPS:
            raise ValueError(f"stall box {b} leaves the lot")
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if boxes_overlap(boxes[i], boxes[j]):
                raise ValueError(f"stalls {i} and {j} overlap")
