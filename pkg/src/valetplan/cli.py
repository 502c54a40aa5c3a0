"""Command line front end.

Every subcommand takes an instance config (a YAML/JSON file or a bare
``<L>x<W>`` name for the default bus-depot setup), writes its artifacts
under ``<out>/<config digest>/`` and prints a JSON summary on stdout. On
failure it prints ``{"error": ..., "message": ...}`` on stderr and exits
with status 2 (status 1 means ``verify`` found a disagreement).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from ._accel import backend_name
from .config import load_config
from .io import dumps
from .pipeline import RunStore, count_matrix, default_out_root, default_workers
from .render import layout_svg, pair_svg, precedence_svg, write_svg
from .sequencing import SequencePair, apply_order, filter_pairs, validate_order
from .verify import verify_layout


def _order(text: str) -> tuple[int, ...]:
    try:
        return validate_order(int(v) for v in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seq(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--workers", type=int, default=argparse.SUPPRESS,
                   help="worker processes (default: $VALETPLAN_WORKERS or 1); "
                        "output bytes do not depend on it")
    p.add_argument("--out", type=Path, default=argparse.SUPPRESS,
                   help="root of run directories (default: $VALETPLAN_OUT or ./runs)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="valetplan", parents=[common],
                                 description="Relocation-free parking layouts and sequences.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_, *lead):
        p = sub.add_parser(name, parents=[common], help=help_)
        for args, kws in lead:
            p.add_argument(*args, **kws)
        p.add_argument("config", help="config file or <L>x<W> instance name")
        return p

    cmd("layouts", "maximum-capacity unique layouts and adjacency graphs")
    cmd("access", "feasibility screen and accessibility conditions")
    cmd("sequences", "all relocation-free exit and parking sequences")
    p = cmd("schedule", "parking/exit pairs consistent with operation orders")
    p.add_argument("--order", type=_order, action="append", default=None,
                   help="operation order such as 4,0,1,2,3 (repeatable; default: config orders)")
    p.add_argument("--layout", type=int, default=None, help="restrict to one layout id")
    p.add_argument("--first", action="store_true", help="stop at the first pair per order")
    p = cmd("render", "SVG drawings",
            (("what",), {"choices": ["layout", "precedence", "pair"]}))
    p.add_argument("--layout", type=int, required=True, help="layout id (1-based)")
    p.add_argument("--order", type=_order, default=None, help="operation order for 'pair'")
    p.add_argument("--park", type=_seq, default=None,
                   help="parking sequence for 'pair' (default: first valid one)")
    p.add_argument("-o", "--output", type=Path, default=None, help="SVG path")
    p = cmd("verify", "re-derive results with brute-force oracles and the planner")
    p.add_argument("--oracle-max-stalls", type=int, default=5)
    p.add_argument("--no-replay", action="store_true", help="skip sequence replay")
    return ap


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def _run(args) -> int:
    cfg = load_config(args.config)
    workers = getattr(args, "workers", None)
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("--workers must be at least 1")
    store = RunStore(cfg, getattr(args, "out", None) or default_out_root())
    summary = {"command": args.command, "instance": cfg.label, "run_dir": str(store.path)}

    if args.command == "layouts":
        sol = store.layouts()
        summary.update(capacity=sol.capacity, packings=sol.n_packings,
                       unique_layouts=len(sol.layouts))
        _emit(summary)
        return 0

    sol = store.solution1(workers)
    if args.command == "access":
        summary["layouts"] = [{"layout": r.id, "feasible": r.feasible, "blocked": list(r.blocked),
                               "conditions": [str(c) for c in r.conditions] if r.conditions else None}
                              for r in sol.layouts]
    elif args.command == "sequences":
        summary["exit_sequence_counts"] = {str(r.id): len(r.exit_seqs)
                                           for r in sol.layouts if r.feasible}
    elif args.command == "schedule":
        out = store.solution2(sol, args.order, args.first)
        if args.layout is not None:
            sol.layout(args.layout)
            out = [d for d in out if d["layout"] == args.layout]
        summary.update(count_matrix(out))
        if args.order is not None or args.first:
            summary["pairs"] = out
    elif args.command == "render":
        return _render(args, cfg, store, sol, summary)
    elif args.command == "verify":
        return _verify(args, cfg, store, sol, summary)
    _emit(summary)
    return 0


def _render(args, cfg, store, sol, summary) -> int:
    r = sol.layout(args.layout)
    if args.what == "layout":
        svg = layout_svg(r.layout, cfg.lot, r.graph, f"{cfg.label} layout {r.id}")
    elif args.what == "precedence":
        if r.conditions is None:
            raise ValueError(f"layout {r.id} is infeasible; it has no conditions")
        svg = precedence_svg(r.conditions, f"{cfg.label} layout {r.id} precedence")
    else:
        pi = args.order or tuple(range(r.layout.capacity))
        if args.park is not None:
            pair = SequencePair(args.park, apply_order(pi, args.park))
            if pair.exit not in set(r.exit_seqs) or pair.park not in set(r.park_seqs):
                raise ValueError(f"({list(pair.park)}, {list(pair.exit)}) is not a valid pair "
                                 f"for order {list(pi)}")
        else:
            pairs = filter_pairs(r.park_seqs, r.exit_seqs, pi, first=True)
            if not pairs:
                raise ValueError(f"layout {r.id} has no pair for order {list(pi)}")
            pair = pairs[0]
        svg = pair_svg(r.layout, cfg, pair, f"{cfg.label} layout {r.id} order {list(pi)}")
        summary.update(pi=list(pi), park=list(pair.park), exit=list(pair.exit))
    out = args.output or store.file(f"{args.what}_layout{r.id}.svg")
    write_svg(out, svg)
    summary["svg"] = str(out)
    _emit(summary)
    return 0


def _verify(args, cfg, store, sol, summary) -> int:
    report = []
    for r in sol.layouts:
        if not r.feasible:
            continue
        findings = verify_layout(r.layout, cfg, r.conditions, r.exit_seqs,
                                 args.oracle_max_stalls, replay=not args.no_replay)
        report.append({"layout": r.id, "findings": [f.to_json() for f in findings]})
    ok = all(f["ok"] for entry in report for f in entry["findings"])
    store.write("verify.json", {"ok": ok, "layouts": report})
    summary.update(ok=ok, backend=backend_name(),
                   checks={str(e["layout"]): {f["check"]: f["ok"] for f in e["findings"]}
                           for e in report})
    _emit(summary)
    return 0 if ok else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except Exception as exc:  # report every failure in machine-readable form
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
