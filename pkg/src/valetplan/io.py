"""Canonical JSON for every artifact. Same value in, same bytes out."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .layout import Layout, Stall


class IoError(OSError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def write_text(path, text: str) -> Path:
    """Atomic write: concurrent readers never see a half-written file."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def write_json(path, obj: Any) -> Path:
    return write_text(path, dumps(obj))


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def layout_to_json(layout: Layout) -> dict:
    return {
        "stall": [layout.stall_w, layout.stall_l],
        "stalls": [{"index": s.index, "x": s.x, "y": s.y, "orient": s.orient}
                   for s in layout.stalls],
    }


def layout_from_json(data: dict) -> Layout:
    a, b = data["stall"]
    return Layout(tuple(Stall(int(s["index"]), float(s["x"]), float(s["y"]), s["orient"])
                        for s in data["stalls"]), float(a), float(b))
