"""Declarative experiment configuration.

Configs are JSON objects validated strictly: unknown keys anywhere are
hard errors, a seed is always required, and the parsed result is a
fully resolved dict (every default filled in) that runners echo into
their reports so any output is reproducible from the report alone.
"""

from __future__ import annotations

import copy
import json

from .activations import BASE_TAGS, Fixed, LinearMix, QuadraticMix, validate_library
from .benchmarks import FUNCTION_NAMES


class ConfigError(ValueError):
    """Invalid or unknown configuration contents."""


DEFAULT_LIBRARY = ["relu", "gelu", "tanh", "sigmoid"]

_DEFAULTS = {
    "network": {"hidden": [20, 20], "activation": {"kind": "fixed", "base": "relu"}},
    "library": DEFAULT_LIBRARY,
    "optimizer": {
        "lr": 1e-3,
        "epochs": 500,
        "batch_size": 256,
        "shuffle": True,
        "early_stop_patience": None,
    },
    "data": {"train_points": 15000, "eval_points": 3000, "eval_start": 15001,
             "dim": 2, "domain": None, "surface_resolution": 101},
    "forecast": {
        "history": 512,
        "horizon": 96,
        "normalization": "zscore",
        "columns": "ett",
        "split": {"train_months": 16, "val_months": 4, "test_months": 4},
    },
    "pentagon": {"resolution": 25},
    "output": "out",
}

_TOP_KEYS = {"kind", "seed", "target", "output", "network", "library", "optimizer",
             "data", "forecast", "pentagon"}

_ACTIVATION_KEYS = {"kind", "base", "library", "constrained"}


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _merge_defaults(user: dict, defaults: dict, where: str) -> dict:
    _check_keys(user, set(defaults), where)
    out = copy.deepcopy(defaults)
    for key, value in user.items():
        if isinstance(value, dict) and isinstance(defaults.get(key), dict):
            out[key] = _merge_defaults(value, defaults[key], f"{where}.{key}")
        else:
            out[key] = copy.deepcopy(value)
    return out


def _resolve_activation(doc: dict, library, where: str) -> dict:
    """Validate one activation object and fill in its per-kind defaults."""
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object")
    _check_keys(doc, _ACTIVATION_KEYS, where)
    kind = doc.get("kind")
    if kind not in ("fixed", "linear", "quadratic"):
        raise ConfigError(f"{where}.kind must be fixed|linear|quadratic, got {kind!r}")
    if kind == "fixed":
        base = doc.get("base")
        if base not in BASE_TAGS:
            raise ConfigError(f"{where}.base must be one of {BASE_TAGS}, got {base!r}")
        if "library" in doc or "constrained" in doc:
            raise ConfigError(f"{where}: fixed activations take only 'base'")
        return {"kind": "fixed", "base": base}
    lib = list(doc.get("library", library))
    try:
        validate_library(lib)
    except Exception as e:
        raise ConfigError(f"{where}: {e}") from e
    constrained = doc.get("constrained", kind == "linear")
    if not isinstance(constrained, bool):
        raise ConfigError(f"{where}.constrained must be a boolean")
    return {"kind": kind, "library": lib, "constrained": constrained}


def parse_config(doc: dict) -> dict:
    """Validate a raw config dict and return the fully resolved copy."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "config")
    kind = doc.get("kind")
    if kind not in ("synthetic", "forecast", "pentagon"):
        raise ConfigError(f"kind must be synthetic|forecast|pentagon, got {kind!r}")
    if "seed" not in doc or not isinstance(doc["seed"], int) or isinstance(doc["seed"], bool):
        raise ConfigError("seed is required and must be an integer")
    if "target" not in doc or not isinstance(doc["target"], str):
        raise ConfigError("target is required (function name or CSV path)")

    resolved = {
        "kind": kind,
        "seed": doc["seed"],
        "target": doc["target"],
        "output": doc.get("output", _DEFAULTS["output"]),
        "library": list(doc.get("library", _DEFAULTS["library"])),
        "optimizer": _merge_defaults(doc.get("optimizer", {}), _DEFAULTS["optimizer"], "optimizer"),
        "data": _merge_defaults(doc.get("data", {}), _DEFAULTS["data"], "data"),
        "forecast": _merge_defaults(doc.get("forecast", {}), _DEFAULTS["forecast"], "forecast"),
        "pentagon": _merge_defaults(doc.get("pentagon", {}), _DEFAULTS["pentagon"], "pentagon"),
    }

    try:
        validate_library(resolved["library"])
    except Exception as e:
        raise ConfigError(f"library: {e}") from e

    net_doc = doc.get("network", {})
    _check_keys(net_doc, {"hidden", "activation"}, "network")
    hidden = copy.deepcopy(net_doc.get("hidden", _DEFAULTS["network"]["hidden"]))
    if not isinstance(hidden, list) or not hidden or any(
        not isinstance(h, int) or isinstance(h, bool) or h < 1 for h in hidden
    ):
        raise ConfigError(f"network.hidden must be a list of positive ints, got {hidden!r}")
    activation = net_doc.get("activation", _DEFAULTS["network"]["activation"])
    if isinstance(activation, list):
        if len(activation) != len(hidden):
            raise ConfigError(
                f"network.activation list has {len(activation)} entries for {len(hidden)} hidden layers"
            )
        activation = [
            _resolve_activation(a, resolved["library"], f"network.activation[{i}]")
            for i, a in enumerate(activation)
        ]
        specs = activation
    else:
        activation = _resolve_activation(activation, resolved["library"], "network.activation")
        specs = [activation]
    resolved["network"] = {"hidden": hidden, "activation": activation}

    opt = resolved["optimizer"]
    if opt["epochs"] < 0 or opt["batch_size"] < 1 or opt["lr"] <= 0:
        raise ConfigError(f"invalid optimizer settings: {opt}")

    data = resolved["data"]
    if data["train_points"] >= data["eval_start"]:
        raise ConfigError(
            f"data.eval_start ({data['eval_start']}) must exceed train_points"
            f" ({data['train_points']}) so the evaluation set stays held out"
        )

    if kind in ("synthetic", "pentagon") and resolved["target"] not in FUNCTION_NAMES:
        raise ConfigError(
            f"target {resolved['target']!r} is not a test function; known: {FUNCTION_NAMES}"
        )
    if kind == "pentagon":
        if len(resolved["library"]) != 5:
            raise ConfigError(
                f"pentagon sweep needs a 5-member library, got {len(resolved['library'])}"
            )
        for spec in specs:
            if spec["kind"] != "linear":
                raise ConfigError("pentagon sweep requires linear-mix activations")
    if resolved["forecast"]["normalization"] not in ("zscore", "minmax"):
        raise ConfigError(
            f"forecast.normalization must be zscore|minmax, got {resolved['forecast']['normalization']!r}"
        )
    return resolved


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    return parse_config(doc)


def build_activation(doc: dict, library) -> Fixed | LinearMix | QuadraticMix:
    """Instantiate one activation spec from its validated config form."""
    lib = tuple(doc.get("library", library))
    if doc["kind"] == "fixed":
        return Fixed(doc["base"])
    if doc["kind"] == "linear":
        return LinearMix(lib, None, doc.get("constrained", True))
    return QuadraticMix(lib, None, None, doc.get("constrained", False))
