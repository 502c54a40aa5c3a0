"""Deterministic random small lots for the oracle-equivalence checks."""

from __future__ import annotations

import random

from valetplan.geometry import EntranceSegment, LotSpec
from valetplan.layout import NoFit, canonicalize_unique, solve_max_packing

STALL = (3.0, 9.5)


def random_small_lots(count: int = 50, seed: int = 20240607, max_stalls: int = 5):
    """``count`` lots whose maximum packing has 1..max_stalls stalls.

    Sides are multiples of 0.5 m. Most lots keep the whole left side as the
    entrance; some use the bottom side, a partial left span, or two entrances.
    Returns (lot, unique layouts) pairs.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        L = rng.randrange(19, 41) / 2.0   # 9.5 .. 20.0
        W = rng.randrange(19, 33) / 2.0   # 9.5 .. 16.0
        kind = rng.random()
        if kind < 0.6:
            ents = (EntranceSegment("left", (0.0, W)),)
        elif kind < 0.75:
            ents = (EntranceSegment("bottom", (0.0, L)),)
        elif kind < 0.9:
            lo = rng.randrange(0, int(W)) / 2.0
            ents = (EntranceSegment("left", (lo, W)),)
        else:
            ents = (EntranceSegment("left", (0.0, W)), EntranceSegment("right", (0.0, W)))
        lot = LotSpec(width_W=W, length_L=L, entrances=ents)
        try:
            layouts = canonicalize_unique(solve_max_packing(lot, *STALL))
        except NoFit:
            continue
        if not 1 <= layouts[0].capacity <= max_stalls:
            continue
        out.append((lot, layouts))
    return out
