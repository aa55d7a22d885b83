"""YAML run configurations with strict validation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from . import experiments
from .edge_step import EdgeStepFunction, from_spec, parameter_errors
from .seeding import MAX_SEED

COMMANDS = ("generate", "normalize", "campaign", "bootstrap", "urn")
TOP_KEYS = ("command", "edge_step", "horizon", "seed", "replicas", "output", "workers", "params")
FAMILY_KEYS = {
    "constant": {"p"},
    "power_law": {"c", "gamma"},
    "log_power": {"c", "gamma", "beta"},
    "tabulated": {"values", "file", "tail_rule"},
}
COMMAND_PARAMS = {
    "generate": {"tracked": [1], "stride": None, "gap": 0},
    "normalize": {"k_max": 4, "per_decade": 20},
    "campaign": {"kind": None},  # plus the kind's own parameters
    "bootstrap": {"a": None, "r": 2, "snapshot": None},
    "urn": {"red": 2, "blue": 0, "start_time": 1, "birth_time": None, "sequential": False,
            "immigration": True},
}


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass
class RunConfig:
    command: str
    edge_step: dict
    horizon: int
    seed: int
    replicas: int = 1
    output: Optional[str] = None
    workers: int = 1
    params: dict = field(default_factory=dict)

    @property
    def f(self) -> EdgeStepFunction:
        return from_spec(self.edge_step["family"], self.edge_step.get("params", {}))

    def param(self, key):
        v = self.params.get(key)
        return COMMAND_PARAMS[self.command].get(key) if v is None else v

    def as_dict(self) -> dict:
        d = {"command": self.command, "edge_step": self.edge_step, "horizon": self.horizon,
             "seed": self.seed, "replicas": self.replicas, "workers": self.workers,
             "params": self.params}
        if self.output is not None:
            d["output"] = self.output
        return d


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _edge_step_errors(fdoc) -> list[str]:
    if not isinstance(fdoc, dict):
        return ["edge_step must be a mapping with family and params"]
    errors = [f"unknown edge_step key {k!r}" for k in fdoc if k not in ("family", "params")]
    family = fdoc.get("family")
    if family not in FAMILY_KEYS:
        return errors + [f"edge_step.family must be one of {tuple(FAMILY_KEYS)}"]
    params = fdoc.get("params") or {}
    if not isinstance(params, dict):
        return errors + ["edge_step.params must be a mapping"]
    errors += [f"unknown {family} parameter {k!r}" for k in params if k not in FAMILY_KEYS[family]]
    if family == "tabulated" and "file" in params:
        if "values" in params:
            errors.append("tabulated takes either values or file, not both")
        try:
            from_spec(family, params)
        except (OSError, ValueError) as exc:
            errors.append(f"tabulated file: {exc}")
        return errors
    return errors + parameter_errors(family, params)


def _params_errors(command: str, params: dict, horizon, replicas) -> list[str]:
    if not isinstance(params, dict):
        return ["params must be a mapping"]
    if command == "campaign":
        kind = params.get("kind")
        if kind not in experiments.KINDS:
            return [f"params.kind must be one of {experiments.KINDS}"]
        rest = {k: v for k, v in params.items() if k != "kind"}
        if not (_is_int(horizon) and _is_int(replicas)):
            return []
        return experiments.config_errors(kind, horizon, replicas, rest)
    errors = [f"unknown {command} parameter {k!r}" for k in params if k not in COMMAND_PARAMS[command]]
    if command == "bootstrap":
        if params.get("r", 2) is not None and (not _is_int(params.get("r", 2)) or params.get("r", 2) < 2):
            errors.append("r must be an integer >= 2")
        a = params.get("a")
        if a is not None and (not isinstance(a, (int, float)) or a < 0):
            errors.append("a must be a nonnegative number")
    if command == "urn":
        red, blue = params.get("red", 2), params.get("blue", 0)
        if not (_is_int(red) and _is_int(blue)) or red < 1 or blue < 0:
            errors.append("urn needs integers red >= 1 and blue >= 0")
    k_max = params.get("k_max", 4)
    if command == "normalize" and (not _is_int(k_max) or not 0 <= k_max <= 8):
        errors.append("k_max must lie in [0, 8]")
    return errors


def validate(doc) -> list[str]:
    if not isinstance(doc, dict):
        return ["config must be a mapping"]
    errors = [f"unknown key {k!r}" for k in doc if k not in TOP_KEYS]
    command = doc.get("command")
    if command not in COMMANDS:
        errors.append(f"command must be one of {COMMANDS}")
    if "edge_step" not in doc:
        errors.append("missing required field 'edge_step'")
    else:
        errors += _edge_step_errors(doc["edge_step"])
    for key in ("horizon", "seed"):
        if key not in doc:
            errors.append(f"missing required field {key!r}")
    horizon, seed = doc.get("horizon"), doc.get("seed")
    if horizon is not None and (not _is_int(horizon) or horizon < 1):
        errors.append("horizon must be a positive integer")
    if seed is not None and (not _is_int(seed) or not 0 <= seed <= MAX_SEED):
        errors.append("seed must be an integer in [0, 2^64 - 1]")
    replicas = doc.get("replicas", 1)
    if not _is_int(replicas) or replicas < 1:
        errors.append("replicas must be a positive integer")
    workers = doc.get("workers", 1)
    if not _is_int(workers) or workers < 1:
        errors.append("workers must be a positive integer")
    if doc.get("output") is not None and not isinstance(doc["output"], str):
        errors.append("output must be a path string")
    if command in COMMANDS:
        errors += _params_errors(command, doc.get("params") or {}, horizon, replicas)
    return errors


def from_dict(doc) -> RunConfig:
    errors = validate(doc)
    if errors:
        raise ConfigError(errors)
    fdoc = doc["edge_step"]
    return RunConfig(doc["command"], {"family": fdoc["family"], "params": dict(fdoc.get("params") or {})},
                     int(doc["horizon"]), int(doc["seed"]), int(doc.get("replicas", 1)), doc.get("output"),
                     int(doc.get("workers", 1)), dict(doc.get("params") or {}))


def parse_config(text: str) -> RunConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"malformed config: {exc}"]) from exc
    return from_dict(doc)


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.as_dict(), sort_keys=True)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(dump_config(cfg).encode()).hexdigest()
