"""Declarative JSON run configuration.

One file describes either a single node or a whole deployment; a third schema
describes an exploration grid.  Every domain invariant is enforced at load
time and violations name the offending field.  All sections and keys are
optional and fall back to the model defaults; unknown keys are rejected so
typos fail loudly.

Node schema (all keys optional unless noted):

    {
      "node_id": "n01",
      "mode": "periodic_sensing" | "event_detection" | "advertising",
      "position_m": [x, y],
      "v_on": 2.4,
      "pinned_qos": null | 1..7,
      "supercap":  {"capacitance_f", "voltage_v", "v_rated", "v_cutoff", "leak_current_a"},
      "harvester": {"i_ref_a", "v_ref_v", "lux_ref", "scaling"},
      "converter": {"v_boost_min", "eta_boost", "eta_cold", "eta_buck", "i_out_max_a", "v_out_v"},
      "load":      {"i_standby_a", "e_sense_tx_j", "e_event_detect_j", "e_advertise_j", "e_controller_step_j"},
      "table":     [[state, v_lo, v_hi, sense_s, pir_s, adv_s], ... 7 rows]
    }

Deployment schema:

    {
      "base_station_m": [x, y],
      "radio_range_m": 30.0,
      "delivery_model": "hard_range",
      "nodes": [ <node schema>, ... ]
    }

Sweep-grid schema:

    {
      "capacitances_f": [..], "qos_states": [..],
      "mode": "...", "lux_levels": [..], "node": <node schema>
    }
"""

from __future__ import annotations

import json
from pathlib import Path

from .deployment import DeliveryModel, DeploymentConfig
from .energy import ConverterModel, HarvesterModel, LoadModel, SupercapState
from .explore import SweepGrid
from .qos import ApplicationMode, QosTable
from .simulate import NodeConfig


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _check_keys(obj: dict, allowed, where: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


def _build(cls, section: dict, where: str):
    try:
        return cls(**section)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _section(obj: dict, key: str, cls, where: str):
    section = obj.get(key, {})
    if not isinstance(section, dict):
        raise ConfigError(f"{where}.{key}: must be an object")
    fields = cls.__dataclass_fields__
    _check_keys(section, fields, f"{where}.{key}")
    return _build(cls, section, f"{where}.{key}")


_NODE_KEYS = (
    "node_id",
    "mode",
    "position_m",
    "v_on",
    "pinned_qos",
    "supercap",
    "harvester",
    "converter",
    "load",
    "table",
)


def parse_node_config(obj: dict, where: str = "node") -> NodeConfig:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: must be an object")
    _check_keys(obj, _NODE_KEYS, where)

    kwargs = {}
    if "node_id" in obj:
        if not isinstance(obj["node_id"], str) or not obj["node_id"]:
            raise ConfigError(f"{where}.node_id: must be a non-empty string")
        kwargs["node_id"] = obj["node_id"]
    if "mode" in obj:
        try:
            kwargs["mode"] = ApplicationMode(obj["mode"])
        except ValueError:
            raise ConfigError(
                f"{where}.mode: {obj['mode']!r} is not one of "
                f"{[m.value for m in ApplicationMode]}"
            ) from None
    if "position_m" in obj:
        pos = obj["position_m"]
        if not (isinstance(pos, (list, tuple)) and len(pos) == 2):
            raise ConfigError(f"{where}.position_m: must be [x, y]")
        kwargs["position_m"] = (float(pos[0]), float(pos[1]))
    if "v_on" in obj:
        kwargs["v_on"] = float(obj["v_on"])
    if "pinned_qos" in obj and obj["pinned_qos"] is not None:
        kwargs["pinned_qos"] = int(obj["pinned_qos"])

    kwargs["supercap"] = _section(obj, "supercap", SupercapState, where)
    kwargs["harvester"] = _section(obj, "harvester", HarvesterModel, where)
    kwargs["converter"] = _section(obj, "converter", ConverterModel, where)
    kwargs["load"] = _section(obj, "load", LoadModel, where)
    if "table" in obj:
        rows = obj["table"]
        if not isinstance(rows, list):
            raise ConfigError(f"{where}.table: must be a list of 7 rows")
        for i, row in enumerate(rows):
            if not (isinstance(row, (list, tuple)) and len(row) == 6):
                raise ConfigError(
                    f"{where}.table[{i}]: each row is [state, v_lo, v_hi, sense_s, pir_s, adv_s]"
                )
        try:
            kwargs["table"] = QosTable(rows=tuple(tuple(row) for row in rows))
        except ValueError as exc:
            raise ConfigError(f"{where}.table: {exc}") from None

    return _build(NodeConfig, kwargs, where)


_DEPLOYMENT_KEYS = ("base_station_m", "radio_range_m", "delivery_model", "nodes")


def parse_deployment_config(obj: dict, where: str = "deployment") -> DeploymentConfig:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: must be an object")
    _check_keys(obj, _DEPLOYMENT_KEYS, where)
    kwargs = {}
    if "base_station_m" in obj:
        pos = obj["base_station_m"]
        if not (isinstance(pos, (list, tuple)) and len(pos) == 2):
            raise ConfigError(f"{where}.base_station_m: must be [x, y]")
        kwargs["base_station_m"] = (float(pos[0]), float(pos[1]))
    if "radio_range_m" in obj:
        kwargs["radio_range_m"] = float(obj["radio_range_m"])
    if "delivery_model" in obj:
        try:
            kwargs["delivery_model"] = DeliveryModel(obj["delivery_model"])
        except ValueError:
            raise ConfigError(
                f"{where}.delivery_model: {obj['delivery_model']!r} is not one of "
                f"{[m.value for m in DeliveryModel]}"
            ) from None
    nodes = obj.get("nodes", [])
    if not isinstance(nodes, list):
        raise ConfigError(f"{where}.nodes: must be a list")
    kwargs["nodes"] = tuple(
        parse_node_config(n, where=f"{where}.nodes[{i}]") for i, n in enumerate(nodes)
    )
    return _build(DeploymentConfig, kwargs, where)


_GRID_KEYS = ("capacitances_f", "qos_states", "mode", "lux_levels", "node")


def parse_sweep_grid(obj: dict, where: str = "grid") -> tuple[SweepGrid, NodeConfig]:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: must be an object")
    _check_keys(obj, _GRID_KEYS, where)
    kwargs = {}
    for key in ("capacitances_f", "qos_states", "lux_levels"):
        if key in obj:
            if not isinstance(obj[key], list):
                raise ConfigError(f"{where}.{key}: must be a list")
            kwargs[key] = tuple(obj[key])
    if "mode" in obj:
        try:
            kwargs["mode"] = ApplicationMode(obj["mode"])
        except ValueError:
            raise ConfigError(
                f"{where}.mode: {obj['mode']!r} is not one of "
                f"{[m.value for m in ApplicationMode]}"
            ) from None
    grid = _build(SweepGrid, kwargs, where)
    base = parse_node_config(obj.get("node", {}), where=f"{where}.node")
    return grid, base


def _load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None


def load_node_config(path) -> NodeConfig:
    return parse_node_config(_load_json(path), where=str(path))


def load_deployment_config(path) -> DeploymentConfig:
    return parse_deployment_config(_load_json(path), where=str(path))


def load_sweep_grid(path) -> tuple[SweepGrid, NodeConfig]:
    return parse_sweep_grid(_load_json(path), where=str(path))


def load_any_config(path):
    """Dispatch on shape: a 'nodes' key means a deployment, a 'capacitances_f'
    or 'qos_states' key a sweep grid, anything else a single node."""
    obj = _load_json(path)
    if isinstance(obj, dict) and "nodes" in obj:
        return parse_deployment_config(obj, where=str(path))
    if isinstance(obj, dict) and ("capacitances_f" in obj or "qos_states" in obj):
        return parse_sweep_grid(obj, where=str(path))
    return parse_node_config(obj, where=str(path))
