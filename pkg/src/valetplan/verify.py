"""Audits that re-derive results by independent means and report disagreements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .accessibility import ExitQuery, LayoutConditions
from .adjacency import entrance_id
from .geometry import pose_collision_free
from .layout import Layout
from .oracles import brute_force_layout_conditions, brute_force_sequences
from .planner import GoalRegion, Path, parked_vehicle, stall_exit_query
from .sequencing import enumerate_exit_sequences


@dataclass
class Finding:
    check: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.check, "ok": self.ok, **self.detail}


def compare_with_oracle(layout: Layout, cfg, conds: LayoutConditions,
                        query: Optional[ExitQuery] = None) -> Finding:
    query = query or ExitQuery(layout, cfg.lot, cfg.vehicle, cfg.planner)
    bf = brute_force_layout_conditions(layout, cfg.lot, cfg.vehicle, cfg.planner, query=query)
    bad = [p for p in range(layout.capacity) if bf[p] != conds[p]]
    return Finding("conditions_vs_oracle", not bad,
                   {"mismatched_stalls": bad,
                    "oracle": bf.to_json(), "derived": conds.to_json()} if bad else {})


def compare_sequences(conds: LayoutConditions) -> Finding:
    dfs = enumerate_exit_sequences(conds)
    brute = brute_force_sequences(conds)
    return Finding("sequences_vs_permutations", dfs == brute,
                   {"dfs": len(dfs), "brute_force": len(brute)})


def clause_soundness(layout: Layout, cfg, conds: LayoutConditions,
                     query: Optional[ExitQuery] = None) -> Finding:
    """Each clause alone must open the stall; dropping any one of its stalls must not."""
    query = query or ExitQuery(layout, cfg.lot, cfg.vehicle, cfg.planner)
    ents = [entrance_id(k) for k in range(len(cfg.lot.entrances))]
    problems = []
    checked = 0
    for p, cond in enumerate(conds):
        for clause in cond.sorted_clauses():
            checked += 1
            if not any(query.feasible(p, e, clause) for e in ents):
                problems.append({"stall": p, "clause": clause, "issue": "unsound"})
            for s in clause:
                smaller = set(clause) - {s}
                if any(query.feasible(p, e, smaller) for e in ents):
                    problems.append({"stall": p, "clause": clause, "issue": "not_minimal",
                                     "reoccupied": s})
    return Finding("clause_soundness_minimality", not problems,
                   {"clauses": checked, "problems": problems})


def path_is_clean(path: Path, goal: GoalRegion, cfg, obstacles) -> bool:
    """Independent re-check with the plain-Python geometry."""
    poses = path.samples(cfg.vehicle, cfg.planner.collision_step)
    free = all(pose_collision_free(q, cfg.vehicle, obstacles, cfg.lot) for q in poses)
    return free and goal.contains(poses[-1], cfg.vehicle)


def replay_sequences(layout: Layout, cfg, exit_seqs) -> Finding:
    """Drive every exit sequence step by step through the planner."""
    cache: dict[tuple, bool] = {}
    failures = []
    n = layout.capacity
    for seq in exit_seqs:
        for k, p in enumerate(seq):
            occupied = frozenset(seq[k + 1:])
            key = (p, occupied)
            if key not in cache:
                cache[key] = _step_ok(layout, cfg, p, occupied)
            if not cache[key]:
                failures.append({"sequence": list(seq), "step": k, "stall": p})
                break
    return Finding("sequence_replay", not failures,
                   {"sequences": len(exit_seqs), "distinct_steps": len(cache),
                    "failures": failures, "stalls": n})


def _step_ok(layout: Layout, cfg, p: int, occupied: frozenset) -> bool:
    obstacles = [parked_vehicle(layout, i, cfg.vehicle) for i in sorted(occupied)]
    for seg in cfg.lot.entrances:
        path = stall_exit_query(p, seg, occupied, layout, cfg.lot, cfg.vehicle, cfg.planner)
        if path is None:
            continue
        goal = GoalRegion.for_entrance(cfg.lot, seg, cfg.vehicle, cfg.planner)
        if path_is_clean(path, goal, cfg, obstacles):
            return True
    return False


def verify_layout(layout: Layout, cfg, conds: LayoutConditions, exit_seqs=None,
                  oracle_max_stalls: int = 5, replay: bool = True) -> list[Finding]:
    query = ExitQuery(layout, cfg.lot, cfg.vehicle, cfg.planner)
    out = []
    if layout.capacity <= oracle_max_stalls:
        out.append(compare_with_oracle(layout, cfg, conds, query))
    if layout.capacity <= 7:
        out.append(compare_sequences(conds))
    out.append(clause_soundness(layout, cfg, conds, query))
    if replay:
        seqs = enumerate_exit_sequences(conds) if exit_seqs is None else exit_seqs
        out.append(replay_sequences(layout, cfg, seqs))
    return out
