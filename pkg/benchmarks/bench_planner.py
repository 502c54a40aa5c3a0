"""Time the exit-query planner with the numba kernels and with the interpreter fallback.

    python benchmarks/bench_planner.py [--repeat 3] [--quick]

Each backend runs in its own subprocess (the backend is fixed at import time
by VALETPLAN_DISABLE_NUMBA). The parent checks that both backends return the
same verdict, cost and expansion count for every query, then prints a table.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

# (layout id, stall, vacant stalls) on the 15x12 instance
QUERIES = [
    (2, 0, ()),            # free stall, short search
    (2, 3, (4,)),          # needs the neighbour above it gone
    (2, 2, (4,)),          # blocked: search runs until exhausted
    (1, 1, (3, 4)),
    (3, 4, (1, 2, 3)),
]
QUICK = QUERIES[:2]


def child(repeat: int, quick: bool) -> dict:
    from valetplan._accel import backend_name
    from valetplan.config import load_config
    from valetplan.layout import canonicalize_unique, solve_max_packing
    from valetplan.planner import GoalRegion, parked_poses, parked_vehicle, search

    cfg = load_config("15x12")
    layouts = canonicalize_unique(solve_max_packing(cfg.lot, *cfg.stall))
    goal = GoalRegion.for_entrance(cfg.lot, cfg.lot.entrances[0], cfg.vehicle, cfg.planner)
    rows = []
    warm = time.perf_counter()
    search(parked_poses(layouts[1], 0, cfg.vehicle), goal, cfg.vehicle, [], cfg.planner)
    warmup = time.perf_counter() - warm
    for lid, p, vacant in (QUICK if quick else QUERIES):
        lay = layouts[lid - 1]
        obstacles = [parked_vehicle(lay, i, cfg.vehicle) for i in range(lay.capacity)
                     if i != p and i not in vacant]
        starts = parked_poses(lay, p, cfg.vehicle)
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            res = search(starts, goal, cfg.vehicle, obstacles, cfg.planner)
            times.append(time.perf_counter() - t0)
        rows.append({"query": [lid, p, list(vacant)], "status": res.status,
                     "cost": None if res.path is None else round(res.path.cost, 9),
                     "expansions": res.expansions, "best_s": min(times)})
    return {"backend": backend_name(), "warmup_s": warmup, "rows": rows}


def run_backend(disable: bool, repeat: int, quick: bool) -> dict:
    env = dict(os.environ, VALETPLAN_DISABLE_NUMBA="1" if disable else "0")
    cmd = [sys.executable, __file__, "--child", "--repeat", str(repeat)]
    if quick:
        cmd.append("--quick")
    out = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True).stdout
    return json.loads(out)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="only the two cheapest queries")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(child(args.repeat, args.quick)))
        return 0

    fast = run_backend(False, args.repeat, args.quick)
    slow = run_backend(True, 1, args.quick)  # the interpreter path is slow; once is enough
    print(f"{'query (layout, stall, vacant)':32} {'status':10} {'exp':>6} "
          f"{fast['backend']:>10} {slow['backend']:>10} {'speedup':>8}")
    agree = True
    for a, b in zip(fast["rows"], slow["rows"]):
        same = (a["status"], a["cost"], a["expansions"]) == (b["status"], b["cost"], b["expansions"])
        agree &= same
        q = f"{a['query'][0]}, {a['query'][1]}, {a['query'][2]}"
        print(f"{q:32} {a['status']:10} {a['expansions']:6d} {a['best_s']:10.4f} "
              f"{b['best_s']:10.4f} {b['best_s'] / a['best_s']:8.1f}"
              + ("" if same else "  MISMATCH"))
    print(f"numba first-call overhead (compile or cache load): {fast['warmup_s']:.2f} s")
    print("backends agree" if agree else "backends DISAGREE")
    return 0 if agree else 1


if __name__ == "__main__":
    sys.exit(main())
