"""Deterministic SVG 1.1 drawings of layouts, precedence graphs and maneuver frames.

Coordinates are printed with fixed precision and elements are emitted in a
fixed order, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .accessibility import LayoutConditions, precedence_graph
from .adjacency import AdjacencyGraph
from .geometry import LotSpec, OrientedRect, footprint
from .io import write_text
from .layout import Layout
from .planner import Path, parked_vehicle, stall_exit_query
from .sequencing import SequencePair

PX = 20.0  # pixels per meter
PAD = 1.0  # meters of margin around drawings

STYLE = {
    "lot": 'fill="#f7f7f7" stroke="#333333" stroke-width="2"',
    "entrance": 'stroke="#2ca02c" stroke-width="5"',
    "stall": 'fill="#dbe9f6" stroke="#1f77b4" stroke-width="1.5"',
    "parked": 'fill="#9e9e9e" stroke="#424242" stroke-width="1"',
    "moving": 'fill="none" stroke="#d62728" stroke-width="1" stroke-opacity="0.35"',
    "moving_end": 'fill="#d62728" fill-opacity="0.35" stroke="#d62728" stroke-width="1.5"',
    "path": 'fill="none" stroke="#d62728" stroke-width="1.5"',
    "edge": 'stroke="#ff7f0e" stroke-width="1.5" stroke-dasharray="4 3"',
    "text": 'font-family="DejaVu Sans, Arial, sans-serif" font-size="12" fill="#111111"',
}


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class _Canvas:
    """World meters to SVG pixels with y pointing up."""

    def __init__(self, x0: float, y0: float, x1: float, y1: float, ox: float = 0.0,
                 oy: float = 0.0):
        self.x0, self.y1 = x0 - PAD, y1 + PAD
        self.w = (x1 - x0 + 2 * PAD) * PX
        self.h = (y1 - y0 + 2 * PAD) * PX
        self.ox, self.oy = ox, oy
        self.parts: list[str] = []

    def pt(self, x: float, y: float) -> tuple[str, str]:
        return _f(self.ox + (x - self.x0) * PX), _f(self.oy + (self.y1 - y) * PX)

    def polygon(self, pts, style: str) -> None:
        coords = " ".join(",".join(self.pt(x, y)) for x, y in pts)
        self.parts.append(f'<polygon points="{coords}" {style}/>')

    def polyline(self, pts, style: str) -> None:
        coords = " ".join(",".join(self.pt(x, y)) for x, y in pts)
        self.parts.append(f'<polyline points="{coords}" {style}/>')

    def line(self, a, b, style: str) -> None:
        (x1, y1), (x2, y2) = self.pt(*a), self.pt(*b)
        self.parts.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {style}/>')

    def text(self, x: float, y: float, s: str, anchor: str = "middle") -> None:
        px, py = self.pt(x, y)
        self.parts.append(f'<text x="{px}" y="{py}" text-anchor="{anchor}" '
                          f'dominant-baseline="central" {STYLE["text"]}>{escape(s)}</text>')

    def rect(self, r: OrientedRect, style: str) -> None:
        self.polygon(r.corners(), style)


def svg_document(width: float, height: float, body: Sequence[str], title: str = "") -> str:
    head = ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_f(width)}" height="{_f(height)}" '
            f'viewBox="0 0 {_f(width)} {_f(height)}">\n')
    defs = ('<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" '
            'markerWidth="7" markerHeight="7" orient="auto">'
            '<path d="M 0 0 L 10 5 L 0 10 z" fill="#555555"/></marker></defs>\n')
    t = f"<title>{escape(title)}</title>\n" if title else ""
    return head + t + defs + "\n".join(body) + "\n</svg>\n"


def _draw_lot(c: _Canvas, lot: LotSpec) -> None:
    c.polygon([(0, 0), (lot.length_L, 0), (lot.length_L, lot.width_W), (0, lot.width_W)],
              STYLE["lot"])
    for seg in lot.entrances:
        c.line(*lot.side_points(seg.side, *seg.span), STYLE["entrance"])


def _draw_layout(c: _Canvas, layout: Layout, lot: LotSpec, labels: bool = True) -> None:
    _draw_lot(c, lot)
    for i in range(layout.capacity):
        x0, y0, x1, y1 = layout.box(i)
        c.polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], STYLE["stall"])
        if labels:
            c.text(*layout.center(i), str(i))


def layout_svg(layout: Layout, lot: LotSpec, graph: Optional[AdjacencyGraph] = None,
               title: str = "") -> str:
    """Stalls with index labels, entrances in green, adjacency edges dashed."""
    c = _Canvas(-1.0, 0.0, lot.length_L, lot.width_W)
    _draw_layout(c, layout, lot)
    if graph is not None:
        for u, v in graph.edge_list():
            c.line(_node_xy(u, layout, lot), _node_xy(v, layout, lot), STYLE["edge"])
    return svg_document(c.w, c.h, c.parts, title)


def _node_xy(n, layout: Layout, lot: LotSpec) -> tuple[float, float]:
    if isinstance(n, str):
        seg = lot.entrances[int(n[1:])]
        (ax, ay), (bx, by) = lot.side_points(seg.side, *seg.span)
        return (ax + bx) / 2.0, (ay + by) / 2.0
    return layout.center(n)


def precedence_svg(conds: LayoutConditions, title: str = "") -> str:
    """Stall variables on a circle, AND nodes between their inputs and target."""
    g = precedence_graph(conds)
    n = len(conds)
    radius = max(4.0, 1.2 * n)
    pos = {}
    for p in range(n):
        a = math.pi / 2 - 2 * math.pi * p / n
        pos[f"y{p}"] = (radius * math.cos(a), radius * math.sin(a))
    incoming: dict[str, list[str]] = {}
    outgoing: dict[str, str] = {}
    for a, b in g["edges"]:
        if a.startswith("and"):
            outgoing[a] = b
        elif b.startswith("and"):
            incoming.setdefault(b, []).append(a)
    for node in g["nodes"]:
        if node["kind"] == "and":
            pts = [pos[s] for s in incoming[node["id"]]]
            sx = sum(x for x, _ in pts) / len(pts)
            sy = sum(y for _, y in pts) / len(pts)
            tx, ty = pos[outgoing[node["id"]]]
            pos[node["id"]] = (0.6 * sx + 0.4 * tx, 0.6 * sy + 0.4 * ty)
    c = _Canvas(-radius - 1.5, -radius - 1.5, radius + 1.5, radius + 1.5)
    node_r = 0.8
    arrow = STYLE["edge"].replace('stroke="#ff7f0e"', 'stroke="#555555"').replace(
        ' stroke-dasharray="4 3"', "") + ' marker-end="url(#arrow)"'
    for a, b in g["edges"]:
        (x1, y1), (x2, y2) = pos[a], pos[b]
        d = math.hypot(x2 - x1, y2 - y1) or 1.0
        ux, uy = (x2 - x1) / d, (y2 - y1) / d
        c.line((x1 + ux * node_r, y1 + uy * node_r), (x2 - ux * node_r, y2 - uy * node_r), arrow)
    for node in g["nodes"]:
        x, y = pos[node["id"]]
        if node["kind"] == "and":
            c.polygon([(x - 0.8, y - 0.45), (x + 0.8, y - 0.45), (x + 0.8, y + 0.45),
                       (x - 0.8, y + 0.45)], 'fill="#fff3cd" stroke="#8a6d3b" stroke-width="1"')
            c.text(x, y, "AND")
        else:
            fill = "#c7e9c0" if node["free"] else "#dbe9f6"
            cx, cy = c.pt(x, y)
            c.parts.append(f'<circle cx="{cx}" cy="{cy}" r="{_f(node_r * PX)}" fill="{fill}" '
                           f'stroke="#1f77b4" stroke-width="1.5"/>')
            c.text(x, y, node["id"])
    return svg_document(c.w, c.h, c.parts, title)


@dataclass(frozen=True)
class Frame:
    phase: str  # "park" | "exit"
    step: int
    stall: int
    occupied: tuple[int, ...]
    path: Optional[Path]


def pair_frames(layout: Layout, cfg, pair: SequencePair) -> list[Frame]:
    """One maneuver per step: arrivals fill ``pair.park``, departures follow ``pair.exit``.

    A parking maneuver is the time-reversed exit maneuver under the same
    occupancy.
    """
    frames = []
    cache: dict[tuple, Optional[Path]] = {}

    def exit_path(p: int, occupied: tuple[int, ...]) -> Optional[Path]:
        key = (p, occupied)
        if key not in cache:
            found = None
            for seg in cfg.lot.entrances:
                found = stall_exit_query(p, seg, occupied, layout, cfg.lot, cfg.vehicle,
                                         cfg.planner)
                if found is not None:
                    break
            cache[key] = found
        return cache[key]

    for k, p in enumerate(pair.park):
        occ = tuple(sorted(pair.park[:k]))
        path = exit_path(p, occ)
        frames.append(Frame("park", k, p, occ, path.reversed() if path else None))
    for k, p in enumerate(pair.exit):
        occ = tuple(sorted(pair.exit[k + 1:]))
        frames.append(Frame("exit", k, p, occ, exit_path(p, occ)))
    return frames


def frames_svg(layout: Layout, cfg, frames: Sequence[Frame], title: str = "",
               per_row: Optional[int] = None) -> str:
    """Grid of frames; each shows parked vehicles, the maneuver trace and the final pose."""
    lot, spec = cfg.lot, cfg.vehicle
    depth = cfg.planner.apron_factor * spec.length
    # every frame shares one window: lot plus the part of the apron paths use
    xs, ys = [0.0, lot.length_L], [0.0, lot.width_W]
    for fr in frames:
        if fr.path is not None:
            for q in fr.path.samples(spec, 0.5):
                x0, y0, x1, y1 = footprint(q, spec).bounds()
                xs += [x0, x1]
                ys += [y0, y1]
    bx0, by0 = max(min(xs), -depth), max(min(ys), -depth)
    bx1, by1 = min(max(xs), lot.length_L + depth), min(max(ys), lot.width_W + depth)
    per_row = per_row or max(1, len(frames) // 2 if len(frames) > 5 else len(frames))
    fw = (bx1 - bx0 + 2 * PAD) * PX
    fh = (by1 - by0 + 2 * PAD) * PX + 24
    parts = []
    for idx, fr in enumerate(frames):
        ox, oy = (idx % per_row) * fw, (idx // per_row) * fh
        c = _Canvas(bx0, by0, bx1, by1, ox, oy + 24)
        parts.append(f'<g class="frame" id="frame{idx}" data-phase="{fr.phase}" '
                     f'data-step="{fr.step}" data-stall="{fr.stall}">')
        _draw_layout(c, layout, lot)
        for i in fr.occupied:
            c.rect(parked_vehicle(layout, i, spec), STYLE["parked"])
        if fr.path is None:
            c.text((bx0 + bx1) / 2, (by0 + by1) / 2, "no path")
        else:
            poses = fr.path.samples(spec, 0.25)
            for q in poses[::8]:
                c.rect(footprint(q, spec), STYLE["moving"])
            end = poses[-1] if fr.phase == "park" else poses[0]
            c.rect(footprint(end, spec), STYLE["moving_end"])
            c.polyline([(w.pose.x, w.pose.y) for w in fr.path.waypoints], STYLE["path"])
        c.parts.append(f'<text x="{_f(ox + 6)}" y="{_f(oy + 16)}" {STYLE["text"]}>'
                       f'{escape(f"{fr.phase} step {fr.step + 1}: stall {fr.stall}")}</text>')
        parts.extend(c.parts)
        parts.append("</g>")
    rows = (len(frames) + per_row - 1) // per_row
    return svg_document(fw * min(per_row, max(1, len(frames))), fh * max(rows, 1), parts, title)


def pair_svg(layout: Layout, cfg, pair: SequencePair, title: str = "") -> str:
    return frames_svg(layout, cfg, pair_frames(layout, cfg, pair), title)


def write_svg(path, svg: str):
    return write_text(path, svg)
