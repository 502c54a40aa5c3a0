"""End-to-end orchestration: layouts, conditions and sequences, then order filtering.

Work fans out to a process pool at layout and stall granularity. Results are
collected with ``Executor.map``, which returns them in submission order, so
artifacts do not depend on the worker count or on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .accessibility import (AccessCondition, ExitQuery, LayoutConditions, access_graph,
                            exit_reach, precedence_dot, precedence_graph, stall_condition)
from .adjacency import AdjacencyGraph, build_adjacency
from .config import InstanceConfig
from .io import layout_from_json, layout_to_json, read_json, write_json, write_text
from .layout import Layout, canonicalize_unique, solve_max_packing
from .sequencing import enumerate_exit_sequences, filter_pairs, park_sequences_from_exit

ENV_WORKERS = "VALETPLAN_WORKERS"
ENV_OUT = "VALETPLAN_OUT"
DEFAULT_OUT = "runs"


def default_workers() -> int:
    raw = os.environ.get(ENV_WORKERS, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_WORKERS} must be an integer, got {raw!r}") from None
    return max(1, n)


def default_out_root() -> Path:
    return Path(os.environ.get(ENV_OUT) or DEFAULT_OUT)


def parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


@dataclass
class LayoutResult:
    id: int
    layout: Layout
    graph: AdjacencyGraph
    blocked: tuple[int, ...] = ()
    access: Optional[AdjacencyGraph] = None  # graph plus screened exit edges
    conditions: Optional[LayoutConditions] = None
    exit_seqs: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.blocked

    @property
    def park_seqs(self) -> list[tuple[int, ...]]:
        return park_sequences_from_exit(self.exit_seqs)


@dataclass
class Solution1:
    config: InstanceConfig
    capacity: int
    n_packings: int
    layouts: list[LayoutResult]

    def layout(self, layout_id: int) -> LayoutResult:
        for r in self.layouts:
            if r.id == layout_id:
                return r
        raise KeyError(f"no layout {layout_id}; known ids are {[r.id for r in self.layouts]}")

    # ---- artifacts -------------------------------------------------------
    def layouts_json(self) -> dict:
        return {
            "instance": self.config.label,
            "capacity": self.capacity,
            "packings": self.n_packings,
            "layouts": [{"id": r.id, **layout_to_json(r.layout), "adjacency": r.graph.to_json()}
                        for r in self.layouts],
        }

    def conditions_json(self) -> list[dict]:
        out = []
        for r in self.layouts:
            entry = {"layout": r.id, "feasible": r.feasible, "blocked": list(r.blocked),
                     "access_graph": r.access.to_json() if r.access else None,
                     "conditions": r.conditions.to_json() if r.conditions else None}
            out.append(entry)
        return out

    def sequences_json(self) -> list[dict]:
        return [{"layout": r.id, "exitSeqs": [list(s) for s in r.exit_seqs],
                 "parkSeqs": [list(s) for s in r.park_seqs]}
                for r in self.layouts if r.feasible]

    def precedence_json(self) -> list[dict]:
        return [{"layout": r.id, **precedence_graph(r.conditions)}
                for r in self.layouts if r.conditions is not None]

    @classmethod
    def from_json(cls, config: InstanceConfig, layouts: dict, conditions: list,
                  sequences: list) -> "Solution1":
        conds = {c["layout"]: c for c in conditions}
        seqs = {s["layout"]: s for s in sequences}
        results = []
        for d in layouts["layouts"]:
            c = conds[d["id"]]
            results.append(LayoutResult(
                d["id"], layout_from_json(d), AdjacencyGraph.from_json(d["adjacency"]),
                tuple(c["blocked"]),
                AdjacencyGraph.from_json(c["access_graph"]) if c.get("access_graph") else None,
                LayoutConditions.from_json(c["conditions"]) if c["conditions"] is not None else None,
                [tuple(s) for s in seqs.get(d["id"], {}).get("exitSeqs", [])]))
        return cls(config, layouts["capacity"], layouts["packings"], results)


def solve_layouts(cfg: InstanceConfig) -> tuple[int, list[Layout]]:
    """Number of optimal packings found and the unique layouts among them."""
    packings = solve_max_packing(cfg.lot, *cfg.stall)
    return len(packings), canonicalize_unique(packings)


def _graph(cfg: InstanceConfig, layout: Layout) -> AdjacencyGraph:
    return build_adjacency(layout, cfg.lot, *cfg.adjacency)


def _screen_task(args) -> dict[int, list[str]]:
    cfg, layout = args
    return exit_reach(layout, cfg.lot, cfg.vehicle, cfg.planner)


def _condition_task(args):
    cfg, layout, graph, p = args
    query = ExitQuery(layout, cfg.lot, cfg.vehicle, cfg.planner)
    return stall_condition(p, layout, cfg.lot, cfg.vehicle, cfg.planner, graph, query).to_json()


def layout_stage(cfg: InstanceConfig) -> Solution1:
    n_pack, layouts = solve_layouts(cfg)
    results = [LayoutResult(k, lay, _graph(cfg, lay)) for k, lay in enumerate(layouts, start=1)]
    capacity = layouts[0].capacity if layouts else 0
    return Solution1(cfg, capacity, n_pack, results)


def run_solution1(cfg: InstanceConfig, workers: int = 1,
                  base: Optional[Solution1] = None) -> Solution1:
    """Packing, compaction, feasibility screen, conditions and exit sequences."""
    sol = base or layout_stage(cfg)
    reaches = parallel_map(_screen_task, [(cfg, r.layout) for r in sol.layouts], workers)
    for r, reach in zip(sol.layouts, reaches):
        r.blocked = tuple(p for p, ents in reach.items() if not ents)
        r.access = access_graph(r.graph, reach) if r.feasible else None
    feasible = [r for r in sol.layouts if r.feasible]
    tasks = [(cfg, r.layout, r.access, p) for r in feasible for p in range(r.layout.capacity)]
    conds = iter(parallel_map(_condition_task, tasks, workers))
    for r in feasible:
        r.conditions = LayoutConditions(tuple(AccessCondition.from_json(next(conds))
                                              for _ in range(r.layout.capacity)))
        r.exit_seqs = enumerate_exit_sequences(r.conditions)
    return sol


def run_solution2(sol: Solution1, orders: Optional[Iterable[Sequence[int]]] = None,
                  first: bool = False) -> list[dict]:
    """Pairs for every (feasible layout, order); orders default to the config's."""
    out = []
    for r in sol.layouts:
        if not r.feasible:
            continue
        pis = sol.config.orders_for(r.layout.capacity) if orders is None else list(orders)
        parks = r.park_seqs
        for pi in pis:
            pairs = filter_pairs(parks, r.exit_seqs, pi, first=first)
            out.append({"layout": r.id, "pi": list(pi), "count": len(pairs),
                        "pairs": [p.to_json() for p in pairs]})
    return out


def count_matrix(sol2: list[dict]) -> dict:
    """Pair counts with one row per order and one column per layout."""
    layouts = sorted({d["layout"] for d in sol2})
    orders: list[list[int]] = []
    for d in sol2:
        if d["pi"] not in orders:
            orders.append(d["pi"])
    cell = {(tuple(d["pi"]), d["layout"]): d["count"] for d in sol2}
    return {"layouts": layouts, "orders": orders,
            "counts": [[cell.get((tuple(pi), k), 0) for k in layouts] for pi in orders]}


class RunStore:
    """Run directory named by the config digest, so reruns reuse earlier stages."""

    def __init__(self, cfg: InstanceConfig, root: Optional[Path] = None):
        self.cfg = cfg
        self.path = Path(root or default_out_root()) / cfg.digest()

    def file(self, name: str) -> Path:
        return self.path / name

    def has(self, *names: str) -> bool:
        return all(self.file(n).exists() for n in names)

    def write(self, name: str, obj) -> Path:
        return write_json(self.file(name), obj)

    def read(self, name: str):
        return read_json(self.file(name))

    def _stamp(self) -> None:
        self.write("config.json", self.cfg.to_dict())

    def layouts(self) -> Solution1:
        if self.has("layouts.json"):
            data = self.read("layouts.json")
            return Solution1.from_json(self.cfg, data, [
                {"layout": d["id"], "blocked": [], "conditions": None} for d in data["layouts"]], [])
        sol = layout_stage(self.cfg)
        self._stamp()
        self.write("layouts.json", sol.layouts_json())
        return sol

    def solution1(self, workers: int = 1) -> Solution1:
        names = ("layouts.json", "conditions.json", "sequences.json")
        if self.has(*names):
            return Solution1.from_json(self.cfg, *(self.read(n) for n in names))
        sol = run_solution1(self.cfg, workers, base=self.layouts())
        self.write("conditions.json", sol.conditions_json())
        self.write("sequences.json", sol.sequences_json())
        self.write("precedence.json", sol.precedence_json())
        for r in sol.layouts:
            if r.conditions is not None:
                write_text(self.file(f"precedence_layout{r.id}.dot"), precedence_dot(r.conditions))
        return sol

    def solution2(self, sol: Solution1, orders=None, first: bool = False) -> list[dict]:
        out = run_solution2(sol, orders, first)
        if orders is None and not first:
            self.write("pairs.json", out)
            self.write("pair_counts.json", count_matrix(out))
        return out
