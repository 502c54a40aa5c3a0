"""Exhaustive reference computations used to audit the fast algorithms.

These are meant for small instances only: the condition oracle asks the
planner about every vacancy subset, and the sequence oracle filters every
permutation.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Optional

from .accessibility import (BOTTOM, AccessCondition, ExitQuery, LayoutConditions, access_graph,
                            antichain, exit_reach, or_merge)
from .adjacency import AdjacencyGraph, build_adjacency, restrict_to_entrance
from .geometry import DEFAULT_VEHICLE, LotSpec, VehicleSpec
from .layout import Layout
from .planner import PlannerParams


def is_connected(g: AdjacencyGraph, nodes: set) -> bool:
    nodes = set(nodes)
    if not nodes:
        return True
    start = min(nodes, key=str)
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            if v in nodes and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == nodes


def brute_force_condition(p: int, e: str, layout: Layout, lot: LotSpec,
                          spec: VehicleSpec = DEFAULT_VEHICLE,
                          params: PlannerParams = PlannerParams(),
                          graph: Optional[AdjacencyGraph] = None, connected_only: bool = False,
                          query: Optional[ExitQuery] = None) -> AccessCondition:
    """Minimal vacancy sets for ``p`` to leave through ``e``, by trying them all.

    By default every vacancy pattern the planner accepts counts. With
    ``connected_only`` a set N only counts when N together with the stall and
    the entrance is connected in ``graph`` (the geometric adjacency graph
    unless given), which shows what a graph-restricted search could see.
    """
    query = query or ExitQuery(layout, lot, spec, params)
    g = restrict_to_entrance(graph or build_adjacency(layout, lot), e)
    others = [s for s in range(layout.capacity) if s != p]
    found = []
    for k in range(len(others) + 1):
        for vac in combinations(others, k):
            n = frozenset(vac)
            if any(c <= n for c in found):
                continue  # supersets of a success cannot be minimal
            if connected_only and not is_connected(g, n | {p, e}):
                continue
            if query.feasible(p, e, n):
                found.append(n)
    return AccessCondition(antichain(found))


def brute_force_layout_conditions(layout: Layout, lot: LotSpec,
                                  spec: VehicleSpec = DEFAULT_VEHICLE,
                                  params: PlannerParams = PlannerParams(),
                                  connected_only: bool = False,
                                  graph: Optional[AdjacencyGraph] = None,
                                  query: Optional[ExitQuery] = None) -> LayoutConditions:
    """Per-stall oracle conditions; connectivity (if asked) uses ``graph`` or
    the screened access graph."""
    query = query or ExitQuery(layout, lot, spec, params)
    if graph is None:
        graph = access_graph(build_adjacency(layout, lot),
                             exit_reach(layout, lot, spec, params, query))
    out = []
    for p in range(layout.capacity):
        cond = BOTTOM
        for e in graph.entrances:
            cond = or_merge(cond, brute_force_condition(p, e, layout, lot, spec, params, graph,
                                                        connected_only, query))
        out.append(cond)
    return LayoutConditions(tuple(out))


def is_prefix_feasible(seq, conds: LayoutConditions) -> bool:
    vacant: set[int] = set()
    for p in seq:
        if not conds[p].evaluate(vacant):
            return False
        vacant.add(p)
    return True


def brute_force_sequences(conds: LayoutConditions) -> list[tuple[int, ...]]:
    """Every permutation whose stalls are each accessible once their predecessors left."""
    return [perm for perm in permutations(range(len(conds))) if is_prefix_feasible(perm, conds)]
