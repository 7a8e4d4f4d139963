"""Scenario configuration files.

A config is a YAML mapping. Omitted keys take the defaults of the chosen
profile (``table1`` for the full-size setup, ``desk`` for a laptop-sized
one). Unknown keys are rejected. Power fields accept ``30``, ``"30 dBm"``;
ratio fields accept ``0``, ``"0 dB"``. Placements of the receive UAV, the
target and the tethered/fixed transmit UAVs give x and y as fractions of the
area sides and z in meters; the BS position is absolute.

Example::

    schema_version: 1
    profile: desk
    mode: fixed
    power: {p_uav: 30 dBm, p_bs: "30 dBm"}
    qos: {gamma: 0 dB}
    seeds: 10
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, fields

import numpy as np
import yaml

from .cccp import CccpConfig
from .channels import TAG_UE_DROP, ArrayShape, PropagationParams, stream
from .geometry import NetworkLayout
from .pso import SwarmConfig
from .sinr import db_to_linear, dbm_to_watts

SCHEMA_VERSION = 1
MODES = ("mobile", "fixed", "tethered")


class ConfigError(ValueError):
    """Malformed or invalid configuration; ``problems`` lists every issue found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


def _dataclass_defaults(cls) -> dict:
    obj = cls()
    return {f.name: getattr(obj, f.name) for f in fields(cls)}


TABLE1 = {
    "schema_version": SCHEMA_VERSION,
    "profile": "table1",
    "mode": "fixed",
    "seeds": 1,
    "network": {"n_tx": 3, "n_ue": 20, "n_symbols": 64, "upa": [16, 16], "m_ub": 256, "m_bs": 256,
                "ue_height": 0.0},
    "area": {"dx": 500.0, "dy": 500.0, "z_min": 20.0, "z_max": 200.0, "d_min": 5.0},
    "power": {"p_uav": "30 dBm", "p_bs": "30 dBm", "total": None},
    "qos": {"gamma": "0 dB"},
    "placement": {
        "bs": [0.0, 0.0, 25.0],
        "rx_uav": [0.25, 0.5, 125.0],
        "target": [0.5, 0.75, 0.0],
        "tethered": [[0.5, 0.5, 125.0], [0.5, 0.25, 125.0], [0.75, 0.75, 125.0], [0.25, 0.75, 125.0]],
    },
    "propagation": {k: (float(v) if isinstance(v, float) else v)
                    for k, v in _dataclass_defaults(PropagationParams).items()},
    "optimizer": _dataclass_defaults(CccpConfig),
    "swarm": _dataclass_defaults(SwarmConfig),
    "bcd": {"max_rounds": 5, "tol": 1e-3, "optimize_positions": True, "qos_penalty": True,
            "backhaul_penalty": True},
}

DESK = copy.deepcopy(TABLE1)
DESK["profile"] = "desk"
DESK["seeds"] = 10
DESK["network"].update({"n_ue": 4, "n_symbols": 16, "upa": [4, 4], "m_ub": 16, "m_bs": 16})
# small programs are cheap; run the ascent to a tighter stop so that plateaus do not end it early
DESK["optimizer"].update({"inner_tol": 1e-6, "max_inner": 300})

PROFILES = {"table1": TABLE1, "desk": DESK}

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_level(value, unit: str) -> float:
    """Read a dB/dBm quantity given as a number or ``"<number> <unit>"``."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number or '<number> {unit}'")
    if isinstance(value, (int, float)):
        return float(value)
    m = re.fullmatch(rf"\s*({_NUM})\s*(?:{unit})?\s*", str(value), flags=re.IGNORECASE)
    if not m:
        raise ValueError(f"expected a number or '<number> {unit}', got {value!r}")
    return float(m.group(1))


def _merge(base: dict, update: dict, path: str, problems: list) -> dict:
    out = copy.deepcopy(base)
    for key, val in update.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in base:
            problems.append(f"unknown key '{where}'")
        elif isinstance(base[key], dict):
            if not isinstance(val, dict):
                problems.append(f"'{where}' must be a mapping")
            else:
                out[key] = _merge(base[key], val, where, problems)
        else:
            out[key] = val
    return out


@dataclass
class ScenarioConfig:
    """Validated scenario description; ``tree`` is the merged key-value document."""

    tree: dict

    # convenience accessors --------------------------------------------------
    def get(self, dotted: str):
        node = self.tree
        for part in dotted.split("."):
            node = node[part]
        return node

    @property
    def mode(self) -> str:
        return self.tree["mode"]

    @property
    def n_tx(self) -> int:
        return int(self.tree["network"]["n_tx"])

    @property
    def n_ue(self) -> int:
        return int(self.tree["network"]["n_ue"])

    @property
    def n_symbols(self) -> int:
        return int(self.tree["network"]["n_symbols"])

    @property
    def seeds(self) -> list:
        s = self.tree["seeds"]
        return list(range(s)) if isinstance(s, int) else [int(x) for x in s]

    @property
    def gamma(self) -> float:
        return db_to_linear(parse_level(self.tree["qos"]["gamma"], "dB"))

    @property
    def gamma_db(self) -> float:
        return parse_level(self.tree["qos"]["gamma"], "dB")

    @property
    def arrays(self) -> ArrayShape:
        n = self.tree["network"]
        return ArrayShape(tuple(int(v) for v in n["upa"]), int(n["m_ub"]), int(n["m_bs"]))

    @property
    def propagation(self) -> PropagationParams:
        return PropagationParams(**self.tree["propagation"])

    @property
    def optimizer(self) -> CccpConfig:
        return CccpConfig(**self.tree["optimizer"])

    @property
    def swarm(self) -> SwarmConfig:
        return SwarmConfig(**self.tree["swarm"])

    @property
    def d_min(self) -> float:
        return float(self.tree["area"]["d_min"])

    # power ------------------------------------------------------------------
    def p_uav_w(self) -> float:
        """Per-UAV budget; a configured total is split as ``P / (N_Tx + 1)``."""
        total = self.tree["power"]["total"]
        if total is not None:
            return dbm_to_watts(parse_level(total, "dBm")) / (self.n_tx + 1)
        return dbm_to_watts(parse_level(self.tree["power"]["p_uav"], "dBm"))

    def p_bs_w(self) -> float:
        total = self.tree["power"]["total"]
        if total is not None:
            return dbm_to_watts(parse_level(total, "dBm")) / (self.n_tx + 1)
        return dbm_to_watts(parse_level(self.tree["power"]["p_bs"], "dBm"))

    def pooled_w(self) -> float:
        """Pooled budget of a wired deployment, ``P_b + N_Tx * P_k``."""
        return self.p_bs_w() + self.n_tx * self.p_uav_w()

    # geometry ---------------------------------------------------------------
    def _place(self, frac) -> np.ndarray:
        a = self.tree["area"]
        return np.array([frac[0] * a["dx"], frac[1] * a["dy"], frac[2]], dtype=float)

    def fixed_positions(self) -> np.ndarray:
        return np.array([self._place(p) for p in self.tree["placement"]["tethered"][:self.n_tx]])

    def ue_positions(self, seed: int) -> np.ndarray:
        """UE ``j`` is uniform over the area from its own stream of ``seed``."""
        a = self.tree["area"]
        h = float(self.tree["network"]["ue_height"])
        out = np.zeros((self.n_ue, 3))
        for j in range(self.n_ue):
            xy = stream(seed, TAG_UE_DROP, j).random(2)
            out[j] = [xy[0] * a["dx"], xy[1] * a["dy"], h]
        return out

    def layout(self, seed: int) -> NetworkLayout:
        a = self.tree["area"]
        p = self.tree["placement"]
        return NetworkLayout(bs=np.asarray(p["bs"], dtype=float), uavs=self.fixed_positions(),
                             rx_uav=self._place(p["rx_uav"]), ues=self.ue_positions(seed),
                             target=self._place(p["target"]),
                             r_min=[0.0, 0.0, a["z_min"]], r_max=[a["dx"], a["dy"], a["z_max"]])

    # edits ------------------------------------------------------------------
    def with_value(self, dotted: str, value) -> "ScenarioConfig":
        """Copy with one leaf replaced; ``area.length`` sets both area sides."""
        tree = copy.deepcopy(self.tree)
        if dotted == "area.length":
            tree["area"]["dx"] = tree["area"]["dy"] = value
            return build_config(tree)
        parts = dotted.split(".")
        node = tree
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                raise ConfigError([f"unknown parameter '{dotted}'"])
            node = node[part]
        if parts[-1] not in node or isinstance(node[parts[-1]], dict):
            raise ConfigError([f"unknown parameter '{dotted}'"])
        node[parts[-1]] = value
        return build_config(tree)


def sweepable_parameters(tree: dict = TABLE1, prefix: str = "") -> list:
    out = [] if prefix else ["area.length"]
    for key, val in tree.items():
        name = f"{prefix}.{key}" if prefix else key
        if isinstance(val, dict):
            out += sweepable_parameters(val, name)
        elif name not in ("schema_version", "profile"):
            out.append(name)
    return out


def _validate(tree: dict) -> list:
    problems = []

    def check(cond, msg):
        if not cond:
            problems.append(msg)

    check(tree["schema_version"] == SCHEMA_VERSION, f"schema_version must be {SCHEMA_VERSION}")
    check(tree["mode"] in MODES, f"mode must be one of {', '.join(MODES)}")
    net, area, pw = tree["network"], tree["area"], tree["power"]
    for key in ("n_tx", "n_symbols", "m_ub", "m_bs"):
        check(isinstance(net[key], int) and net[key] >= 1, f"network.{key} must be a positive integer")
    check(isinstance(net["n_ue"], int) and net["n_ue"] >= 0, "network.n_ue must be a non-negative integer")
    check(isinstance(net["n_symbols"], int) and net["n_symbols"] >= 2, "network.n_symbols must be >= 2")
    check(isinstance(net["upa"], (list, tuple)) and len(net["upa"]) == 2
          and all(isinstance(v, int) and v >= 1 for v in net["upa"]), "network.upa must be two positive integers")
    check(area["dx"] > 0 and area["dy"] > 0, "area.dx and area.dy must be positive")
    check(0 <= area["z_min"] <= area["z_max"], "area.z_min must satisfy 0 <= z_min <= z_max")
    check(area["d_min"] >= 0, "area.d_min must be non-negative")
    check(net["ue_height"] >= 0, "network.ue_height must be non-negative")
    for key in ("p_uav", "p_bs", "total"):
        if key == "total" and pw[key] is None:
            continue
        try:
            parse_level(pw[key], "dBm")
        except ValueError as err:
            problems.append(f"power.{key}: {err}")
    try:
        parse_level(tree["qos"]["gamma"], "dB")
    except ValueError as err:
        problems.append(f"qos.gamma: {err}")
    tethered = tree["placement"]["tethered"]
    if isinstance(net["n_tx"], int):
        check(len(tethered) >= net["n_tx"], f"placement.tethered lists {len(tethered)} positions, need n_tx")
    for name in ("rx_uav", "target"):
        check(len(tree["placement"][name]) == 3, f"placement.{name} must have three coordinates")
    check(len(tree["placement"]["bs"]) == 3, "placement.bs must have three coordinates")
    for i, p in enumerate(tethered[:net["n_tx"]] if isinstance(net["n_tx"], int) else []):
        ok = len(p) == 3 and 0 <= p[0] <= 1 and 0 <= p[1] <= 1 and area["z_min"] <= p[2] <= area["z_max"]
        check(ok, f"placement.tethered[{i}] must lie in the unit square at z in [z_min, z_max]")
    s = tree["seeds"]
    check((isinstance(s, int) and s >= 1) or (isinstance(s, list) and s and all(isinstance(v, int) for v in s)),
          "seeds must be a positive count or a non-empty list of integers")
    for section, cls in (("propagation", PropagationParams), ("optimizer", CccpConfig), ("swarm", SwarmConfig)):
        try:
            cls(**tree[section])
        except (TypeError, ValueError) as err:
            problems.append(f"{section}: {err}")
    check(tree["bcd"]["max_rounds"] >= 0, "bcd.max_rounds must be non-negative")
    return problems


def build_config(tree: dict) -> ScenarioConfig:
    """Merge ``tree`` onto its profile defaults and validate."""
    if not isinstance(tree, dict):
        raise ConfigError(["top level must be a mapping"])
    profile = tree.get("profile", "table1")
    if profile not in PROFILES:
        raise ConfigError([f"profile must be one of {', '.join(PROFILES)}"])
    problems = []
    merged = _merge(PROFILES[profile], tree, "", problems)
    if not problems:
        try:
            problems = _validate(merged)
        except (TypeError, KeyError) as err:
            problems = [f"malformed value: {err}"]
    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(merged)


def load_config(path) -> ScenarioConfig:
    """Read and validate a YAML config file; an empty file yields the ``table1`` defaults."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark is not None else ""
        raise ConfigError([f"{path}: {where}{getattr(err, 'problem', err)}"]) from err
    return build_config(tree or {})
