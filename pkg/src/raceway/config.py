"""Run configuration: flat key = value files with full defaulting.

An empty file yields the standard raceway setup (0.4 m mean depth, 0.04
m^2/s discharge, 10 m lap, summer surface light, 10% bottom light). Unknown
keys are rejected so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .hydro import EnvironmentConfig
from .optimizer import OptimizeSettings
from .photosys import HanParameters

__all__ = ["RunConfig", "load_config", "config_dict"]

_FLOAT_KEYS = {
    "Q0", "a0", "L", "g", "zb0", "Is", "bottom_light_fraction",
    "kr", "kd", "tau", "sigma", "k", "R",
    "dt", "tol", "rho",
}
_INT_KEYS = {"max_iter", "Nz", "N", "seed"}

_DEFAULTS = {
    "Q0": 0.04,
    "a0": 0.4,
    "L": 10.0,
    "g": 9.81,
    "zb0": -0.4,
    "Is": 2050.0,
    "bottom_light_fraction": 0.1,
    "kr": 6.8e-3,
    "kd": 2.99e-4,
    "tau": 0.25,
    "sigma": 0.047,
    "k": 8.7e-6,
    "R": 1.389e-7,
    "dt": 0.1,
    "tol": 1e-10,
    "rho": 1e3,
    "max_iter": 500,
    "Nz": 40,
    "N": 5,
    "seed": 0,
}


@dataclass(frozen=True)
class RunConfig:
    env: EnvironmentConfig
    han: HanParameters
    settings: OptimizeSettings
    raw: dict = field(default_factory=dict)


def _parse_file(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ParseError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
            key, _, text = stripped.partition("=")
            key, text = key.strip(), text.strip()
            if key not in _FLOAT_KEYS and key not in _INT_KEYS:
                raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = int(text) if key in _INT_KEYS else float(text)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: cannot parse value {text!r} for {key!r}") from None
    return values


def build_config(overrides: dict | None = None) -> RunConfig:
    """Assemble a validated RunConfig from defaults plus overrides."""
    v = dict(_DEFAULTS)
    v.update(overrides or {})
    for key in ("Q0", "a0", "L", "g", "Is", "kr", "kd", "tau", "sigma", "k", "R",
                "dt", "tol", "rho"):
        if v[key] <= 0:
            raise ValidationError(f"{key} must be positive")
    if not 0 < v["bottom_light_fraction"] < 1:
        raise ValidationError("bottom_light_fraction must lie in (0, 1)")
    if v["max_iter"] < 1:
        raise ValidationError("max_iter must be at least 1")
    if v["Nz"] < 1:
        raise ValidationError("Nz must be at least 1")
    if v["N"] < 0:
        raise ValidationError("N must be non-negative")
    eps = math.log(1.0 / v["bottom_light_fraction"]) / v["a0"]
    try:
        env = EnvironmentConfig(
            Q0=v["Q0"], a0=v["a0"], L=v["L"], g=v["g"], zb0=v["zb0"],
            Is=v["Is"], eps=eps,
        )
    except ValidationError as exc:
        raise ValidationError(str(exc)) from None
    han = HanParameters(kr=v["kr"], kd=v["kd"], tau=v["tau"], sigma=v["sigma"],
                        k=v["k"], R=v["R"])
    settings = OptimizeSettings(tol=v["tol"], rho=v["rho"], max_iter=v["max_iter"],
                                dt=v["dt"], Nz=v["Nz"], N=v["N"], seed=v["seed"])
    return RunConfig(env=env, han=han, settings=settings, raw=v)


def load_config(path) -> RunConfig:
    """Parse and validate a config file; missing keys take default values."""
    return build_config(_parse_file(path))


def config_dict(cfg: RunConfig) -> dict:
    """The exact key/value mapping of a config, for reproducible run reports."""
    out = dict(cfg.raw) if cfg.raw else dict(_DEFAULTS)
    out["eps"] = cfg.env.eps
    return out
