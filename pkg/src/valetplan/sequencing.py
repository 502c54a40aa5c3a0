"""Relocation-free exit/parking sequences and their filtering by operation order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .accessibility import LayoutConditions


class LengthMismatch(ValueError):
    pass


class BottomCondition(ValueError):
    pass


def enumerate_exit_sequences(conds: LayoutConditions) -> list[tuple[int, ...]]:
    """All stall orders in which each vehicle can leave once its predecessors have.

    Depth-first, trying stalls in ascending index, so the output is in
    lexicographic order. Each clause tracks how many of its stalls are still
    occupied; a condition is true as soon as one of its clauses hits zero.
    """
    n = len(conds)
    for p, c in enumerate(conds):
        if c.is_bottom:
            raise BottomCondition(f"stall {p} has an unsatisfiable condition")
    clauses = []  # (owner stall, clause)
    for p, c in enumerate(conds):
        for cl in c.sorted_clauses():
            clauses.append((p, cl))
    remaining = [len(cl) for _, cl in clauses]
    watching: list[list[int]] = [[] for _ in range(n)]
    for k, (_, cl) in enumerate(clauses):
        for s in cl:
            watching[s].append(k)
    satisfied = [0] * n  # clauses of stall p with nothing left occupied
    for k, (p, _) in enumerate(clauses):
        if remaining[k] == 0:
            satisfied[p] += 1

    out: list[tuple[int, ...]] = []
    seq: list[int] = []
    exited = [False] * n

    def vacate(s: int, delta: int) -> None:
        for k in watching[s]:
            before = remaining[k]
            remaining[k] = before - delta
            if delta > 0 and remaining[k] == 0:
                satisfied[clauses[k][0]] += 1
            elif delta < 0 and before == 0:
                satisfied[clauses[k][0]] -= 1

    def dfs() -> None:
        if len(seq) == n:
            out.append(tuple(seq))
            return
        for p in range(n):
            if exited[p] or not satisfied[p]:
                continue
            exited[p] = True
            seq.append(p)
            vacate(p, 1)
            dfs()
            vacate(p, -1)
            seq.pop()
            exited[p] = False

    dfs()
    return out


def park_sequences_from_exit(exit_seqs: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    return [tuple(reversed(s)) for s in exit_seqs]


def validate_order(pi: Sequence[int]) -> tuple[int, ...]:
    pi = tuple(int(v) for v in pi)
    if sorted(pi) != list(range(len(pi))):
        raise ValueError(f"operation order {list(pi)} is not a permutation of 0..{len(pi) - 1}")
    return pi


def apply_order(pi: Sequence[int], park: Sequence[int]) -> tuple[int, ...]:
    """Stall order of departures: the k-th departure is the pi[k]-th arrival."""
    if len(pi) != len(park):
        raise LengthMismatch(f"order has length {len(pi)}, sequence {len(park)}")
    return tuple(park[i] for i in pi)


def cyclic_orders(n: int) -> list[tuple[int, ...]]:
    """The n circular left shifts of the identity, starting with the identity."""
    return [tuple((k + i) % n for i in range(n)) for k in range(n)]


@dataclass(frozen=True)
class SequencePair:
    park: tuple[int, ...]
    exit: tuple[int, ...]

    def to_json(self) -> dict:
        return {"park": list(self.park), "exit": list(self.exit)}

    @classmethod
    def from_json(cls, data: dict) -> "SequencePair":
        return cls(tuple(data["park"]), tuple(data["exit"]))


def filter_pairs(park_seqs: Iterable[Sequence[int]], exit_seqs: Iterable[Sequence[int]],
                 pi: Sequence[int], first: bool = False) -> list[SequencePair]:
    """Parking sequences whose order-induced exit sequence is also valid.

    Equivalent to filtering the full product of parking and exit sequences,
    but each parking sequence has exactly one candidate partner.
    """
    pi = validate_order(pi)
    exits = set()
    for s in exit_seqs:
        if len(s) != len(pi):
            raise LengthMismatch(f"exit sequence {list(s)} does not match order length {len(pi)}")
        exits.add(tuple(s))
    out = []
    for u in park_seqs:
        ex = apply_order(pi, u)
        if ex in exits:
            out.append(SequencePair(tuple(u), ex))
            if first:
                break
    return out
