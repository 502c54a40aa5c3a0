"""Stall/entrance adjacency graph used to seed and prune the accessibility search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .geometry import LotSpec
from .layout import Layout

EPS_ADJ = 0.5
MU_ADJ = 1.0

Node = Hashable  # int for stalls, "e<k>" for entrances


class UnknownEntrance(KeyError):
    pass


def entrance_id(k: int) -> str:
    return f"e{k}"


def node_sort_key(n: Node):
    """Stalls by index first, then entrances by their number."""
    if isinstance(n, str):
        return (1, int(n[1:]))
    return (0, n)


@dataclass(frozen=True)
class AdjacencyGraph:
    nodes: tuple
    edges: frozenset  # of frozenset({u, v})

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(set(self.nodes), key=node_sort_key)))
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise ValueError("self-loops are not allowed")
            if not e <= set(self.nodes):
                raise ValueError(f"edge {set(e)} references unknown nodes")
        object.__setattr__(self, "edges", edges)

    @property
    def stalls(self) -> list[int]:
        return [n for n in self.nodes if not isinstance(n, str)]

    @property
    def entrances(self) -> list[str]:
        return [n for n in self.nodes if isinstance(n, str)]

    def neighbors(self, n: Node) -> list:
        out = [next(iter(e - {n})) for e in self.edges if n in e]
        return sorted(out, key=node_sort_key)

    def has_edge(self, u: Node, v: Node) -> bool:
        return frozenset((u, v)) in self.edges

    def without(self, removed: Iterable[Node]) -> "AdjacencyGraph":
        removed = set(removed)
        return AdjacencyGraph(tuple(n for n in self.nodes if n not in removed),
                              frozenset(e for e in self.edges if not e & removed))

    def edge_list(self) -> list[list]:
        pairs = [sorted(e, key=node_sort_key) for e in self.edges]
        return sorted(pairs, key=lambda p: (node_sort_key(p[0]), node_sort_key(p[1])))

    def to_json(self) -> dict:
        return {"nodes": list(self.nodes), "edges": self.edge_list()}

    @classmethod
    def from_json(cls, data: dict) -> "AdjacencyGraph":
        return cls(tuple(data["nodes"]), frozenset(frozenset(e) for e in data["edges"]))


def _interval_overlap(a0, a1, b0, b1) -> float:
    return min(a1, b1) - max(a0, b0)


def _stalls_adjacent(a, b, eps_adj: float, mu_adj: float) -> bool:
    gap_x = max(b[0] - a[2], a[0] - b[2])
    gap_y = max(b[1] - a[3], a[1] - b[3])
    if -1e-9 <= gap_x <= eps_adj + 1e-9 and _interval_overlap(a[1], a[3], b[1], b[3]) >= mu_adj - 1e-9:
        return True
    if -1e-9 <= gap_y <= eps_adj + 1e-9 and _interval_overlap(a[0], a[2], b[0], b[2]) >= mu_adj - 1e-9:
        return True
    return False


def _entrance_corridor(box, lot: LotSpec, side: str):
    """Region between a stall and ``side`` plus the stall's extent along that side."""
    x0, y0, x1, y1 = box
    if side == "left":
        return (0.0, y0, x0, y1), (y0, y1), x0
    if side == "right":
        return (x1, y0, lot.length_L, y1), (y0, y1), lot.length_L - x1
    if side == "bottom":
        return (x0, 0.0, x1, y0), (x0, x1), y0
    return (x0, y1, x1, lot.width_W), (x0, x1), lot.width_W - y1


def _stall_meets_entrance(i: int, layout: Layout, lot: LotSpec, seg, eps_adj, mu_adj) -> bool:
    box = layout.box(i)
    corridor, (lo, hi), dist = _entrance_corridor(box, lot, seg.side)
    along = _interval_overlap(lo, hi, seg.span[0], seg.span[1])
    if along < mu_adj - 1e-9:
        return False
    if dist <= eps_adj + 1e-9:
        return True
    # boundary-facing stall: the corridor is open unless another stall
    # covers at least mu_adj of the stall's face within it
    horizontal = seg.side in ("left", "right")
    for j in range(layout.capacity):
        if j == i:
            continue
        b = layout.box(j)
        depth = (_interval_overlap(corridor[0], corridor[2], b[0], b[2]) if horizontal
                 else _interval_overlap(corridor[1], corridor[3], b[1], b[3]))
        if depth <= 1e-9:
            continue
        cover = (_interval_overlap(lo, hi, b[1], b[3]) if horizontal
                 else _interval_overlap(lo, hi, b[0], b[2]))
        if cover >= mu_adj - 1e-9:
            return False
    return True


def build_adjacency(layout: Layout, lot: LotSpec, eps_adj: float = EPS_ADJ,
                    mu_adj: float = MU_ADJ) -> AdjacencyGraph:
    """Stall-stall edges for near-touching stalls with long enough shared faces;
    stall-entrance edges for stalls on, or facing with a clear corridor, an entrance."""
    n = layout.capacity
    nodes = list(range(n)) + [entrance_id(k) for k in range(len(lot.entrances))]
    edges = set()
    boxes = [layout.box(i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if _stalls_adjacent(boxes[i], boxes[j], eps_adj, mu_adj):
                edges.add(frozenset((i, j)))
    for k, seg in enumerate(lot.entrances):
        for i in range(n):
            if _stall_meets_entrance(i, layout, lot, seg, eps_adj, mu_adj):
                edges.add(frozenset((i, entrance_id(k))))
    return AdjacencyGraph(tuple(nodes), frozenset(edges))


def restrict_to_entrance(g: AdjacencyGraph, e: str) -> AdjacencyGraph:
    """Drop every entrance node except ``e``."""
    if e not in g.entrances:
        raise UnknownEntrance(e)
    return g.without(x for x in g.entrances if x != e)
