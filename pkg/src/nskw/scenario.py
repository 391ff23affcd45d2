"""Scenario files: JSON schema, dotted-key overrides and bundled presets."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .grid import INITIAL_KINDS, Grid
from .model import ParamSet
from .solver import MANUFACTURED, StepControl

__all__ = [
    "SCHEMA",
    "ConfigError",
    "Scenario",
    "apply_overrides",
    "load_config",
    "load_preset",
    "preset_names",
]


class ConfigError(ValueError):
    """Scenario document or override failed validation."""


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}
_pair = {"type": "array", "items": _pos, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "params", "grid", "initial", "time"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "required": ["alpha", "beta", "lambda", "gamma"],
            "properties": {
                "alpha": _num,
                "beta": _num,
                "lambda": _num,
                "gamma": {"type": "number", "exclusiveMinimum": 1},
                "R": _pos,
                "A": _pos,
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["L", "N"],
            "properties": {"L": _pos, "N": {"type": "integer", "minimum": 16}},
        },
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": list(INITIAL_KINDS)},
                "amplitudes": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"v": _num, "u": _num, "theta": _num},
                },
                "seed": {"type": ["integer", "null"]},
                "width": _pos,
                "modes": {"type": "integer", "minimum": 1},
                "bounds": {
                    "type": ["object", "null"],
                    "additionalProperties": False,
                    "required": ["v", "theta"],
                    "properties": {"v": _pair, "theta": _pair},
                },
            },
        },
        "time": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t_end"],
            "properties": {
                "t_end": _pos,
                "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "dt_max": _pos,
                "dt_min": _pos,
                "record_every": _pos,
                "snapshot_every": _pos,
                "max_rejects": {"type": "integer", "minimum": 0},
            },
        },
        "checks": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "balance_residual": _pos,
                "theta_floor": _pos,
                "kanel": _pos,
                "positivity": {"type": "boolean"},
                "mass_drift": _pos,
                "decay": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "factor": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                        "tail_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                        "smallness": _pos,
                    },
                },
                "order": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"target": _num, "tol": _pos},
                },
            },
        },
        "manufactured": {"enum": sorted(MANUFACTURED)},
    },
}

_VALIDATOR = jsonschema.Draft7Validator(SCHEMA)


def _validate(cfg: dict) -> None:
    errors = sorted(_VALIDATOR.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = ".".join(str(k) for k in e.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {e.message}")
    tm = cfg["time"]
    if tm.get("dt_min", 1e-12) > tm.get("dt_max", 0.05):
        raise ConfigError("time: dt_min exceeds dt_max")


@dataclass(frozen=True)
class Scenario:
    """Validated scenario; ``config`` is the JSON document it was built from."""

    config: dict

    @classmethod
    def from_dict(cls, cfg: dict) -> "Scenario":
        cfg = copy.deepcopy(cfg)
        _validate(cfg)
        return cls(cfg)

    @property
    def name(self) -> str:
        return self.config["name"]

    @property
    def params(self) -> ParamSet:
        return ParamSet.from_dict(self.config["params"])

    @property
    def grid(self) -> Grid:
        g = self.config["grid"]
        return Grid(float(g["L"]), int(g["N"]))

    @property
    def initial(self) -> dict:
        return self.config["initial"]

    @property
    def t_end(self) -> float:
        return float(self.config["time"]["t_end"])

    @property
    def control(self) -> StepControl:
        tm = self.config["time"]
        return StepControl(
            cfl=tm.get("cfl", 0.5),
            dt_max=tm.get("dt_max", 0.05),
            dt_min=tm.get("dt_min", 1e-12),
            max_rejects=tm.get("max_rejects", 20),
        )

    @property
    def record_every(self) -> float | None:
        return self.config["time"].get("record_every")

    @property
    def snapshot_every(self) -> float | None:
        return self.config["time"].get("snapshot_every")

    @property
    def checks(self) -> dict:
        return self.config.get("checks", {})

    @property
    def manufactured(self) -> str | None:
        return self.config.get("manufactured")

    def with_overrides(self, overrides) -> "Scenario":
        return Scenario.from_dict(apply_overrides(self.config, overrides))

    def to_json(self) -> str:
        return json.dumps(self.config, indent=2, sort_keys=True)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _walk_schema(path):
    node = SCHEMA
    for key in path:
        props = node.get("properties", {})
        if key not in props:
            return None
        node = props[key]
    return node


def apply_overrides(cfg: dict, overrides) -> dict:
    """Apply ``"a.b.c=value"`` strings (or ``(key, value)`` pairs).

    Values are decoded as JSON where possible.  Keys must name a field of the
    schema; the result is validated before it is returned.
    """
    out = copy.deepcopy(cfg)
    items = overrides.items() if isinstance(overrides, dict) else overrides
    for item in items:
        if isinstance(item, str):
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not of the form key=value")
            key, raw = item.split("=", 1)
            value = _parse_value(raw.strip())
        else:
            key, value = item
        path = [k for k in key.strip().split(".") if k]
        if not path or _walk_schema(path) is None:
            raise ConfigError(f"override key {key!r} is not a scenario field")
        node = out
        for k in path[:-1]:
            if node.get(k) is None:
                node[k] = {}
            node = node[k]
        node[path[-1]] = value
    _validate(out)
    return out


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def preset_names() -> list[str]:
    root = resources.files("nskw") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> Scenario:
    name = name[:-5] if name.endswith(".json") else name
    res = resources.files("nskw") / "presets" / f"{name}.json"
    if not res.is_file():
        raise ConfigError(f"no preset named {name!r}; available: {', '.join(preset_names())}")
    return Scenario.from_dict(json.loads(res.read_text()))


def resolve(ref: str) -> Scenario:
    """A path to a scenario file, or the name of a bundled preset."""
    p = Path(ref)
    if p.is_file():
        return Scenario.from_dict(load_config(p))
    return load_preset(ref)
