"""Loading and validating flat YAML run configurations.

The key schema lives in ``recipes/schema.json`` next to the bundled
recipes; both ``simulate`` and ``sweep`` configs share its ``common`` keys.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import yaml

from .analysis import SweepSpec
from .errors import ParameterError, RingTCError
from .model import ModelParams


class ConfigError(RingTCError, ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


def load_schema() -> dict:
    return json.loads(resources.files("ringtc").joinpath("recipes/schema.json").read_text())


def recipe_path(name: str) -> Path:
    path = resources.files("ringtc").joinpath(f"recipes/{name}.yaml")
    if not path.is_file():
        available = sorted(p.name[:-5] for p in resources.files("ringtc").joinpath("recipes").iterdir() if p.name.endswith(".yaml"))
        raise ConfigError("recipe", f"unknown recipe {name!r}; available: {', '.join(available)}")
    return Path(str(path))


def _float(key, v) -> float:
    if isinstance(v, bool):
        raise ConfigError(key, f"expected a number, got {v!r}")
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {v!r}") from None
    if not math.isfinite(x):
        raise ConfigError(key, f"expected a finite number, got {v!r}")
    return x


def _int(key, v) -> int:
    x = _float(key, v)
    if x != int(x):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    return int(x)


def _coerce(key: str, kind: str, v):
    if kind == "str":
        return str(v)
    if kind == "float":
        return _float(key, v)
    if kind == "int":
        return _int(key, v)
    if kind in ("float_list", "float_or_list", "pair"):
        if isinstance(v, (list, tuple)):
            vals = [_float(key, x) for x in v]
        elif kind == "float_or_list":
            return _float(key, v)
        else:
            raise ConfigError(key, f"expected a list, got {v!r}")
        if not vals:
            raise ConfigError(key, "list is empty")
        if kind == "pair" and len(vals) != 2:
            raise ConfigError(key, f"expected [start, end], got {v!r}")
        return vals
    raise AssertionError(kind)


def validate(raw: dict, kind: str) -> dict:
    """Check ``raw`` against the schema and fill defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a flat key-value mapping")
    schema = load_schema()
    keys = {**schema["common"], **schema[kind]}
    unknown = sorted(set(raw) - set(keys))
    if unknown:
        raise ConfigError(unknown[0], f"unknown key for '{kind}'")
    out = {}
    for key, info in keys.items():
        if key in raw and raw[key] is not None:
            out[key] = _coerce(key, info["type"], raw[key])
        elif info.get("required"):
            raise ConfigError(key, "missing required key")
        elif "default" in info:
            out[key] = info["default"]
    if kind == "simulate":
        given = [k for k in ("Omega", "Omega_over_OmegaTC") if k in out]
        if len(given) != 1:
            raise ConfigError("Omega", "give exactly one of Omega, Omega_over_OmegaTC")
    return out


def load_config(path, kind: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}") from None
    return validate(raw or {}, kind)


def base_params(cfg: dict) -> ModelParams:
    """ModelParams with Omega=0, epsilon=0, rescaled so that omega0 = 1."""
    w0 = cfg["omega0"]
    try:
        return ModelParams(delta_omega=cfg["delta_omega"] / w0, g=cfg["g"] / w0, N=cfg["N"])
    except ParameterError as exc:
        key = next((k for k in ("delta_omega", "g", "N", "omega0") if k in exc.invariant), "delta_omega")
        raise ConfigError(key, str(exc)) from None


def simulate_params(cfg: dict) -> list[ModelParams]:
    base = base_params(cfg)
    if "Omega" in cfg:
        Omega = cfg["Omega"] / cfg["omega0"]
    else:
        Omega = cfg["Omega_over_OmegaTC"] * base.Omega_TC
    eps = cfg["epsilon"] if isinstance(cfg["epsilon"], list) else [cfg["epsilon"]]
    out = []
    for e in eps:
        try:
            out.append(base.replace(Omega=Omega, epsilon=e))
        except ParameterError as exc:
            key = "epsilon" if "epsilon" in exc.invariant else "Omega"
            raise ConfigError(key, str(exc)) from None
    return out


def sweep_spec(cfg: dict) -> SweepSpec:
    try:
        return SweepSpec(
            Omega_grid=cfg["Omega_over_OmegaTC"],
            epsilon_grid=cfg["epsilon"],
            T_grid=cfg["T_over_TR"],
            base=base_params(cfg),
            dt=cfg["dt_over_TR"],
            tol_phi=cfg["tol_phi"],
            fit_window=tuple(cfg["fit_window_TR"]),
            memory_window=tuple(cfg["memory_window_TR"]),
            phase_window=tuple(cfg["phase_window_TR"]),
        )
    except ParameterError as exc:
        names = {
            "Omega_grid": "Omega_over_OmegaTC",
            "epsilon_grid": "epsilon",
            "T_grid": "T_over_TR",
            "dt": "dt_over_TR",
            "fit window": "fit_window_TR",
            "phase window": "phase_window_TR",
        }
        key = next((v for k, v in names.items() if exc.invariant.startswith(k)), exc.invariant)
        raise ConfigError(key, str(exc)) from None
