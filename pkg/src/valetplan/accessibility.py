"""Per-stall accessibility conditions as minimal DNF formulas over vacancy variables.

A condition is a set of clauses; each clause is a set of stalls that must all
be vacant. The empty clause makes a condition always true (``TOP``), while an
empty clause set is always false (``BOTTOM``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .adjacency import (AdjacencyGraph, build_adjacency, entrance_id, node_sort_key,
                        restrict_to_entrance)
from .geometry import DEFAULT_VEHICLE, LotSpec, VehicleSpec
from .layout import Layout
from .planner import PlannerParams, stall_exit_query


class UnknownNode(KeyError):
    pass


class InfeasibleLayout(ValueError):
    def __init__(self, stalls: Iterable[int]):
        self.stalls = tuple(sorted(stalls))
        super().__init__(f"stalls {list(self.stalls)} cannot reach any entrance "
                         "even with every other stall vacant")


def _clause_key(c: frozenset) -> tuple:
    return (len(c), tuple(sorted(c)))


def antichain(clauses: Iterable[Iterable[int]]) -> frozenset:
    """Drop every clause that strictly contains another (absorption)."""
    uniq = sorted({frozenset(c) for c in clauses}, key=_clause_key)
    kept: list[frozenset] = []
    for c in uniq:
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


@dataclass(frozen=True)
class AccessCondition:
    clauses: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "clauses", antichain(self.clauses))

    @property
    def is_top(self) -> bool:
        return frozenset() in self.clauses

    @property
    def is_bottom(self) -> bool:
        return not self.clauses

    def sorted_clauses(self) -> list[list[int]]:
        return [sorted(c) for c in sorted(self.clauses, key=_clause_key)]

    def evaluate(self, vacant: Iterable[int]) -> bool:
        vacant = set(vacant)
        return any(c <= vacant for c in self.clauses)

    def variables(self) -> set[int]:
        return set().union(*self.clauses) if self.clauses else set()

    def to_json(self):
        if self.is_top:
            return "TOP"
        if self.is_bottom:
            return "BOTTOM"
        return self.sorted_clauses()

    @classmethod
    def from_json(cls, data) -> "AccessCondition":
        if data == "TOP":
            return TOP
        if data == "BOTTOM":
            return BOTTOM
        return cls(frozenset(frozenset(c) for c in data))

    def __str__(self) -> str:
        if self.is_top:
            return "True"
        if self.is_bottom:
            return "False"
        terms = []
        for c in self.sorted_clauses():
            lits = " & ".join(f"y{s}" for s in c)
            terms.append(lits if len(c) == 1 else f"({lits})")
        return " | ".join(terms)


TOP = AccessCondition(frozenset([frozenset()]))
BOTTOM = AccessCondition(frozenset())


def or_merge(a: AccessCondition, b: AccessCondition) -> AccessCondition:
    return AccessCondition(a.clauses | b.clauses)


class ExitQuery:
    """Memoized planner feasibility for one layout.

    ``feasible(p, e, vacant)`` asks whether the vehicle in stall ``p`` can
    leave through entrance ``e`` while every stall outside ``vacant`` (and
    other than ``p``) holds a parked vehicle.
    """

    def __init__(self, layout: Layout, lot: LotSpec, spec: VehicleSpec = DEFAULT_VEHICLE,
                 params: PlannerParams = PlannerParams()):
        self.layout, self.lot, self.spec, self.params = layout, lot, spec, params
        self._cache: dict[tuple, bool] = {}
        self.calls = 0

    def feasible(self, p: int, e: str, vacant: Iterable[int]) -> bool:
        vacant = frozenset(vacant) - {p}
        key = (p, e, vacant)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.calls += 1
        occupied = set(range(self.layout.capacity)) - vacant - {p}
        ok = stall_exit_query(p, e, occupied, self.layout, self.lot, self.spec,
                              self.params) is not None
        self._cache[key] = ok
        return ok


def shortest_path(g: AdjacencyGraph, src, dst) -> Optional[list]:
    """Fewest-edge path; ties go to the smallest node at each BFS discovery."""
    if src not in g.nodes or dst not in g.nodes:
        return None
    parent = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for v in g.neighbors(u):
            if v not in parent:
                parent[v] = u
                queue.append(v)
    if dst not in parent:
        return None
    path = [dst]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


class _CondSearch:
    """State of one ``get_access_cond`` call: visited sets and clauses so far."""

    def __init__(self, p: int, e: str, query: ExitQuery):
        self.p, self.e, self.query = p, e, query
        self.visited: set[frozenset] = set()
        self.clauses: list[frozenset] = []
        self.top = False
        self.n_stalls = query.layout.capacity
        self._detoured: set[frozenset] = set()

    def expand(self, g: AdjacencyGraph, seed: Iterable) -> None:
        p, e = self.p, self.e
        inner = g.without((p, e))
        todo = deque([frozenset(seed) - {p, e}])
        while todo:
            n = todo.popleft()
            if n in self.visited:
                continue
            self.visited.add(n)
            if self.top or any(c <= n for c in self.clauses):
                continue
            if self.query.feasible(p, e, n):
                if n:
                    self.clauses.append(n)
                else:
                    self.top = True
                continue
            if len(n) + 1 >= self.n_stalls:
                continue  # nothing left to vacate
            # grow by one stall adjacent to N, p or e: every set reached keeps
            # N + {p, e} connected, and a bare stall-entrance seed still grows
            frontier = {v for s in n | {p, e} for v in g.neighbors(s) if v in inner.nodes} - n
            for i in sorted(frontier, key=node_sort_key):
                todo.append(n | {i})

    def detour(self, g: AdjacencyGraph, seed: list) -> None:
        key = frozenset(g.nodes)
        if key in self._detoured:
            return  # an identical subgraph was already explored from here
        self._detoured.add(key)
        for i in sorted(set(seed) - {self.p, self.e}, key=node_sort_key):
            reduced = g.without([i])
            q = shortest_path(reduced, self.p, self.e)
            if q is not None:
                self.expand(g, q)
                self.detour(reduced, q)

    def result(self) -> AccessCondition:
        if self.top:
            return TOP
        return AccessCondition(frozenset(self.clauses))


def get_access_cond(p: int, e: str, g: AdjacencyGraph, layout: Layout, lot: LotSpec,
                    spec: VehicleSpec = DEFAULT_VEHICLE, params: PlannerParams = PlannerParams(),
                    query: Optional[ExitQuery] = None) -> AccessCondition:
    """Minimal vacant-stall sets that let stall ``p`` leave through entrance ``e``.

    Candidates are connected node sets grown breadth-first from a shortest
    stall-to-entrance path in ``g``, then from shortest paths that avoid each
    path node in turn (recursively). Supersets of accepted clauses and
    revisited sets are never sent to the planner.
    """
    for node in (p, e):
        if node not in g.nodes:
            raise UnknownNode(node)
    query = query or ExitQuery(layout, lot, spec, params)
    state = _CondSearch(p, e, query)
    q = shortest_path(g, p, e)
    if q is None:
        return BOTTOM
    state.expand(g, q)
    state.detour(g, q)
    return state.result()


@dataclass(frozen=True)
class LayoutConditions:
    conditions: tuple[AccessCondition, ...]

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))

    def __getitem__(self, p: int) -> AccessCondition:
        return self.conditions[p]

    def __len__(self) -> int:
        return len(self.conditions)

    def __iter__(self):
        return iter(self.conditions)

    def to_json(self) -> list[dict]:
        return [{"stall": p, "cond": c.to_json()} for p, c in enumerate(self.conditions)]

    @classmethod
    def from_json(cls, data: list[dict]) -> "LayoutConditions":
        items = sorted(data, key=lambda d: d["stall"])
        if [d["stall"] for d in items] != list(range(len(items))):
            raise ValueError("conditions must cover stalls 0..n-1 exactly once")
        return cls(tuple(AccessCondition.from_json(d["cond"]) for d in items))

    @classmethod
    def from_mapping(cls, conds: Mapping[int, AccessCondition]) -> "LayoutConditions":
        return cls(tuple(conds[p] for p in range(len(conds))))


def exit_reach(layout: Layout, lot: LotSpec, spec: VehicleSpec = DEFAULT_VEHICLE,
               params: PlannerParams = PlannerParams(),
               query: Optional[ExitQuery] = None) -> dict[int, list[str]]:
    """Entrances each stall can reach when every other stall is empty."""
    query = query or ExitQuery(layout, lot, spec, params)
    everyone = range(layout.capacity)
    ents = [entrance_id(k) for k in range(len(lot.entrances))]
    return {p: [e for e in ents if query.feasible(p, e, everyone)] for p in everyone}


def blocked_stalls(layout: Layout, lot: LotSpec, spec: VehicleSpec = DEFAULT_VEHICLE,
                   params: PlannerParams = PlannerParams(),
                   query: Optional[ExitQuery] = None) -> list[int]:
    """Stalls that reach no entrance even when every other stall is empty."""
    return [p for p, ents in exit_reach(layout, lot, spec, params, query).items() if not ents]


def screen_feasible(layout: Layout, lot: LotSpec, spec: VehicleSpec = DEFAULT_VEHICLE,
                    params: PlannerParams = PlannerParams(),
                    query: Optional[ExitQuery] = None) -> bool:
    return not blocked_stalls(layout, lot, spec, params, query)


def access_graph(graph: AdjacencyGraph, reach: Mapping[int, Iterable[str]]) -> AdjacencyGraph:
    """The adjacency graph plus a direct edge for every stall-entrance pair the
    screen proved drivable, which is the graph the condition search runs on."""
    extra = {frozenset((p, e)) for p, ents in reach.items() for e in ents}
    return AdjacencyGraph(graph.nodes, graph.edges | extra)


def stall_condition(p: int, layout: Layout, lot: LotSpec, spec: VehicleSpec = DEFAULT_VEHICLE,
                    params: PlannerParams = PlannerParams(),
                    graph: Optional[AdjacencyGraph] = None,
                    query: Optional[ExitQuery] = None) -> AccessCondition:
    """OR of the per-entrance conditions of one stall over ``graph`` as given."""
    graph = graph or build_adjacency(layout, lot)
    query = query or ExitQuery(layout, lot, spec, params)
    cond = BOTTOM
    for e in graph.entrances:
        cond = or_merge(cond, get_access_cond(p, e, restrict_to_entrance(graph, e), layout, lot,
                                              spec, params, query))
    return cond


def derive_layout_conditions(layout: Layout, lot: LotSpec, spec: VehicleSpec = DEFAULT_VEHICLE,
                             params: PlannerParams = PlannerParams(),
                             graph: Optional[AdjacencyGraph] = None,
                             query: Optional[ExitQuery] = None) -> LayoutConditions:
    """Screen the layout, add the screened exit edges to ``graph`` and derive every
    stall's condition."""
    query = query or ExitQuery(layout, lot, spec, params)
    reach = exit_reach(layout, lot, spec, params, query)
    blocked = [p for p, ents in reach.items() if not ents]
    if blocked:
        raise InfeasibleLayout(blocked)
    g = access_graph(graph or build_adjacency(layout, lot), reach)
    return LayoutConditions(tuple(stall_condition(p, layout, lot, spec, params, g, query)
                                  for p in range(layout.capacity)))


def precedence_graph(conds: LayoutConditions) -> dict:
    """Vacancy precedence graph: ``y_i -> y_j`` when stall i appears in the
    condition of j, routed through an AND node for multi-stall clauses."""
    nodes = [{"id": f"y{p}", "kind": "stall", "free": c.is_top}
             for p, c in enumerate(conds)]
    edges = []
    for j, cond in enumerate(conds):
        if cond.is_top:
            continue
        for k, clause in enumerate(cond.sorted_clauses()):
            if len(clause) == 1:
                edges.append([f"y{clause[0]}", f"y{j}"])
                continue
            and_id = f"and{j}_{k}"
            nodes.append({"id": and_id, "kind": "and", "free": False})
            edges.extend([f"y{s}", and_id] for s in clause)
            edges.append([and_id, f"y{j}"])
    return {"nodes": nodes, "edges": edges}


def precedence_dot(conds: LayoutConditions) -> str:
    g = precedence_graph(conds)
    lines = ["digraph precedence {", "  rankdir=LR;"]
    for n in g["nodes"]:
        if n["kind"] == "and":
            lines.append(f'  {n["id"]} [label="AND", shape=box];')
        else:
            shape = "doublecircle" if n["free"] else "circle"
            lines.append(f'  {n["id"]} [label="{n["id"]}", shape={shape}];')
    lines.extend(f"  {a} -> {b};" for a, b in g["edges"])
    lines.append("}")
    return "\n".join(lines) + "\n"
