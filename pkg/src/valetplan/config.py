"""Instance configuration: one YAML or JSON file per lot, with bus-depot defaults."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from .adjacency import EPS_ADJ, MU_ADJ
from .geometry import DEFAULT_VEHICLE, EntranceSegment, LotSpec, VehicleSpec
from .planner import PlannerParams
from .sequencing import cyclic_orders, validate_order

INSTANCE_RE = re.compile(r"^(\d+(?:\.\d+)?)x(\d+(?:\.\d+)?)$")
CYCLIC_ALL = "cyclic-all"


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class InstanceConfig:
    lot: LotSpec
    stall: tuple[float, float] = (3.0, 9.5)
    vehicle: VehicleSpec = DEFAULT_VEHICLE
    planner: PlannerParams = PlannerParams()
    adjacency: tuple[float, float] = (EPS_ADJ, MU_ADJ)
    orders: Union[str, tuple[tuple[int, ...], ...]] = CYCLIC_ALL
    name: Optional[str] = None

    def __post_init__(self):
        a, b = self.stall
        if not (a > 0 and b > 0):
            raise ConfigInvalid("stall dimensions must be positive")
        if a < self.vehicle.width or b < self.vehicle.length:
            raise ConfigInvalid(f"stall {a}x{b} is smaller than the vehicle "
                                f"{self.vehicle.width}x{self.vehicle.length}")
        if not self.lot.entrances:
            raise ConfigInvalid("the lot needs at least one entrance")
        if self.orders != CYCLIC_ALL:
            try:
                orders = tuple(validate_order(pi) for pi in self.orders)
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(str(exc)) from exc
            object.__setattr__(self, "orders", orders)

    def orders_for(self, n: int) -> list[tuple[int, ...]]:
        """Concrete operation orders for a layout with ``n`` stalls."""
        if self.orders == CYCLIC_ALL:
            return cyclic_orders(n)
        return list(self.orders)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return f"{_num(self.lot.length_L)}x{_num(self.lot.width_W)}"

    def to_dict(self) -> dict:
        planner = dataclasses.asdict(self.planner)
        planner["step_sizes"] = list(planner["step_sizes"])
        return {
            "name": self.label,
            "lot": {"length_L": self.lot.length_L, "width_W": self.lot.width_W,
                    "entrances": [{"side": e.side, "span": list(e.span)}
                                  for e in self.lot.entrances]},
            "stall": {"a": self.stall[0], "b": self.stall[1]},
            "vehicle": dataclasses.asdict(self.vehicle),
            "planner": planner,
            "adjacency": {"eps_adj": self.adjacency[0], "mu_adj": self.adjacency[1]},
            "orders": self.orders if self.orders == CYCLIC_ALL else [list(o) for o in self.orders],
        }

    def digest(self) -> str:
        """Short content hash naming this configuration's run directory."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else str(v)


def _angle(v: Any) -> float:
    """Numbers pass through; strings like ``"pi/36"`` are evaluated."""
    if isinstance(v, (int, float)):
        return float(v)
    m = re.fullmatch(r"(-)?(?:(\d+(?:\.\d+)?)\*)?pi(?:/(\d+(?:\.\d+)?))?", str(v).replace(" ", ""))
    if not m:
        raise ConfigInvalid(f"cannot read angle {v!r}")
    sign, coef, div = m.groups()
    value = float(coef or 1.0) * math.pi / float(div or 1.0)
    return -value if sign else value


def _pick(d: dict, allowed: set, where: str) -> dict:
    extra = set(d) - allowed
    if extra:
        raise ConfigInvalid(f"unknown keys in {where}: {sorted(extra)}")
    return d


def config_from_dict(data: dict) -> InstanceConfig:
    if not isinstance(data, dict):
        raise ConfigInvalid("configuration must be a mapping")
    _pick(data, {"name", "instance", "lot", "stall", "vehicle", "planner", "adjacency",
                 "orders"}, "config")
    try:
        lot_d = dict(data.get("lot") or {})
        if "instance" in data:
            m = INSTANCE_RE.match(str(data["instance"]))
            if not m:
                raise ConfigInvalid(f"instance must look like <L>x<W>, got {data['instance']!r}")
            lot_d.setdefault("length_L", float(m.group(1)))
            lot_d.setdefault("width_W", float(m.group(2)))
        _pick(lot_d, {"length_L", "width_W", "entrances"}, "lot")
        if "length_L" not in lot_d or "width_W" not in lot_d:
            raise ConfigInvalid("lot needs length_L and width_W (or an instance name)")
        L, W = float(lot_d["length_L"]), float(lot_d["width_W"])
        ents = lot_d.get("entrances")
        if ents is None:
            lot = LotSpec.with_left_entrance(L, W)
        else:
            segs = []
            for e in ents:
                _pick(e, {"side", "span"}, "entrance")
                side = e["side"]
                span = e.get("span") or [0.0, W if side in ("left", "right") else L]
                segs.append(EntranceSegment(side, (float(span[0]), float(span[1]))))
            lot = LotSpec(width_W=W, length_L=L, entrances=tuple(segs))

        st = _pick(dict(data.get("stall") or {}), {"a", "b"}, "stall")
        stall = (float(st.get("a", 3.0)), float(st.get("b", 9.5)))

        veh = _pick(dict(data.get("vehicle") or {}),
                    {f.name for f in dataclasses.fields(VehicleSpec)}, "vehicle")
        if "max_steer" in veh:
            veh["max_steer"] = _angle(veh["max_steer"])
        vehicle = dataclasses.replace(DEFAULT_VEHICLE, **{k: float(v) for k, v in veh.items()})

        pl = _pick(dict(data.get("planner") or {}),
                   {f.name for f in dataclasses.fields(PlannerParams)}, "planner")
        if "angle_resolution" in pl:
            pl["angle_resolution"] = _angle(pl["angle_resolution"])
        for k in ("max_iterations", "steer_samples"):
            if k in pl:
                pl[k] = int(pl[k])
        if "step_sizes" in pl:
            pl["step_sizes"] = tuple(float(s) for s in pl["step_sizes"])
        planner = PlannerParams(**pl)

        adj = _pick(dict(data.get("adjacency") or {}), {"eps_adj", "mu_adj"}, "adjacency")
        adjacency = (float(adj.get("eps_adj", EPS_ADJ)), float(adj.get("mu_adj", MU_ADJ)))

        orders = data.get("orders", CYCLIC_ALL)
        if orders != CYCLIC_ALL:
            if not isinstance(orders, list):
                raise ConfigInvalid(f"orders must be {CYCLIC_ALL!r} or a list of permutations")
            orders = tuple(tuple(int(v) for v in pi) for pi in orders)
        return InstanceConfig(lot=lot, stall=stall, vehicle=vehicle, planner=planner,
                              adjacency=adjacency, orders=orders, name=data.get("name"))
    except ConfigInvalid:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigInvalid(str(exc)) from exc


def load_config(source: Union[str, Path]) -> InstanceConfig:
    """Read a config file, or build the default config for an ``<L>x<W>`` name."""
    path = Path(source)
    if not path.exists():
        m = INSTANCE_RE.match(str(source))
        if m:
            return config_from_dict({"instance": str(source), "name": str(source)})
        raise ConfigInvalid(f"no such config file: {source}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc
    return config_from_dict(data or {})
