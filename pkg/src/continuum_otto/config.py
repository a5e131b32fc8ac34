"""Run configuration: JSON parsing, validation and serialization.

Schema (every key optional, unknown keys rejected)::

    {
      "mode": "free" | "equilibrium",
      "hot":  {"delta_gap": 1.0, "broadening": 2.0, "rho": 1.0, "e0": 0.0},
      "cold": {"delta_gap": 1.0, "broadening": 1.0, "rho": 2.0, "e0": 0.0},
      "t_hot": 5.0, "t_cold": 1.0,
      "p0_hot": 0.3, "p0_cold": 0.5,
      "sweep": {"axes": [{"param": "delta_h", "min": 0.05, "max": 5.0, "count": 101}]},
      "tolerances": {"quad": 1e-12, "match": 1e-9, "ladder": 1e-5},
      "format": "csv" | "json",
      "kt_l": 1.0
    }

Omitted values fall back to the plotted work-difference point:
``p0_cold = 0.5, p0_hot = 0.3, KT_h = 5, KT_l = 1``.  ``cold.rho`` may be
omitted, in which case it follows from the rescaling constraint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .equilibrium import equilibrium_endpoints
from .model import (
    CycleSpec,
    LevelStructure,
    PopulationEndpoints,
    SpecError,
    validate_spec,
)
from .oracle import VerificationConfig
from .sweep import DEFAULT_AXES, PARAMETERS, Axis, GridConfig


class ConfigError(ValueError):
    """Malformed or semantically invalid configuration."""


@dataclass(frozen=True)
class StructureConfig:
    delta_gap: float
    broadening: float
    rho: float | None = None
    e0: float = 0.0


@dataclass(frozen=True)
class Tolerances:
    quad: float = 1e-12
    match: float = 1e-9
    ladder: float = 1e-5


@dataclass(frozen=True)
class RunConfig:
    mode: str = "free"
    hot: StructureConfig = StructureConfig(1.0, 2.0, 1.0, 0.0)
    cold: StructureConfig = StructureConfig(1.0, 1.0, None, 0.0)
    t_hot: float = 5.0
    t_cold: float = 1.0
    p0_hot: float | None = 0.3
    p0_cold: float | None = 0.5
    sweep: tuple[Axis, ...] = DEFAULT_AXES
    tolerances: Tolerances = field(default_factory=Tolerances)
    format: str = "csv"
    kt_l: float = 1.0

    def spec(self) -> CycleSpec:
        hot_rho = self.hot.rho if self.hot.rho is not None else 1.0
        cold_rho = self.cold.rho
        if cold_rho is None:
            cold_rho = hot_rho * self.hot.broadening / self.cold.broadening
        hot = LevelStructure(self.hot.e0, self.hot.delta_gap, self.hot.broadening, hot_rho)
        cold = LevelStructure(self.cold.e0, self.cold.delta_gap, self.cold.broadening, cold_rho)
        return CycleSpec(hot, cold, self.t_hot, self.t_cold)

    def endpoints(self, spec: CycleSpec | None = None) -> PopulationEndpoints:
        if self.mode == "equilibrium":
            return equilibrium_endpoints(spec or self.spec())
        return PopulationEndpoints(self.p0_hot, self.p0_cold, "free")

    def flat_parameters(self) -> dict[str, float]:
        params = {
            "gap_h": self.hot.delta_gap, "delta_h": self.hot.broadening,
            "gap_l": self.cold.delta_gap, "delta_l": self.cold.broadening,
            "rho_h": self.hot.rho if self.hot.rho is not None else 1.0,
            "t_hot": self.t_hot, "t_cold": self.t_cold,
            "e0_h": self.hot.e0, "e0_l": self.cold.e0,
        }
        if self.mode == "free":
            params["p0_hot"] = self.p0_hot
            params["p0_cold"] = self.p0_cold
        return params

    def grid_config(self, workers: int = 1) -> GridConfig:
        return GridConfig(tuple(self.sweep), self.flat_parameters(), self.mode, workers=workers)

    def verification_config(self) -> VerificationConfig:
        t = self.tolerances
        return VerificationConfig(quad_tol=t.quad, match_tol=t.match, ladder_tol=t.ladder)


_TOP_KEYS = {"mode", "hot", "cold", "t_hot", "t_cold", "p0_hot", "p0_cold",
             "sweep", "tolerances", "format", "kt_l"}
_STRUCTURE_KEYS = {"delta_gap", "broadening", "rho", "e0"}
_AXIS_KEYS = {"param", "min", "max", "count"}
_TOL_KEYS = {"quad", "match", "ladder"}


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        prefix = f"{where}." if where else ""
        raise ConfigError(f"unknown key(s): {', '.join(prefix + k for k in unknown)}")


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number")
    return value


def _object(value: Any, key: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{key}: expected an object")
    return value


def _structure(raw: dict, default: StructureConfig, key: str) -> StructureConfig:
    raw = _object(raw, key)
    _reject_unknown(raw, _STRUCTURE_KEYS, key)
    values = {
        "delta_gap": default.delta_gap, "broadening": default.broadening,
        "rho": default.rho, "e0": default.e0,
    }
    for k in _STRUCTURE_KEYS & set(raw):
        values[k] = _number(raw[k], f"{key}.{k}")
    return StructureConfig(**values)


def _axes(raw: dict) -> tuple[Axis, ...]:
    raw = _object(raw, "sweep")
    _reject_unknown(raw, {"axes"}, "sweep")
    if "axes" not in raw:
        return DEFAULT_AXES
    if not isinstance(raw["axes"], list) or not raw["axes"]:
        raise ConfigError("sweep.axes: expected a non-empty list")
    axes = []
    for n, item in enumerate(raw["axes"]):
        key = f"sweep.axes[{n}]"
        item = _object(item, key)
        _reject_unknown(item, _AXIS_KEYS, key)
        missing = sorted(_AXIS_KEYS - set(item))
        if missing:
            raise ConfigError(f"{key}: missing {', '.join(missing)}")
        if item["param"] not in PARAMETERS:
            raise ConfigError(f"{key}.param: unknown parameter {item['param']!r}")
        count = item["count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ConfigError(f"{key}.count: expected an integer >= 1")
        try:
            axes.append(Axis(item["param"], _number(item["min"], f"{key}.min"),
                             _number(item["max"], f"{key}.max"), count))
        except SpecError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    return tuple(axes)


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a decoded JSON object and fill defaults."""
    raw = _object(raw, "config")
    _reject_unknown(raw, _TOP_KEYS, "")
    defaults = RunConfig()
    mode = raw.get("mode", "free")
    if mode not in ("free", "equilibrium"):
        raise ConfigError(f"mode: expected 'free' or 'equilibrium', got {mode!r}")
    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: expected 'csv' or 'json', got {fmt!r}")

    if mode == "equilibrium":
        given = [k for k in ("p0_hot", "p0_cold") if k in raw]
        if given:
            raise ConfigError(
                f"{', '.join(given)}: endpoints not allowed in equilibrium mode"
            )
        p0_hot = p0_cold = None
    else:
        p0_hot = _number(raw.get("p0_hot", defaults.p0_hot), "p0_hot")
        p0_cold = _number(raw.get("p0_cold", defaults.p0_cold), "p0_cold")
        for key, p in (("p0_hot", p0_hot), ("p0_cold", p0_cold)):
            if not 0.0 < p < 1.0:
                raise ConfigError(f"{key}: must lie strictly inside (0, 1), got {p!r}")

    tol = defaults.tolerances
    if "tolerances" in raw:
        t = _object(raw["tolerances"], "tolerances")
        _reject_unknown(t, _TOL_KEYS, "tolerances")
        tol = Tolerances(**{k: _number(t.get(k, getattr(tol, k)), f"tolerances.{k}") for k in _TOL_KEYS})
        for k in _TOL_KEYS:
            if getattr(tol, k) <= 0:
                raise ConfigError(f"tolerances.{k}: must be > 0")
        if tol.quad > 1e-3:
            raise ConfigError("tolerances.quad: must be <= 1e-3")

    kt_l = _number(raw.get("kt_l", 1.0), "kt_l")
    if kt_l <= 0:
        raise ConfigError("kt_l: must be > 0")

    config = RunConfig(
        mode=mode,
        hot=_structure(raw.get("hot", {}), defaults.hot, "hot"),
        cold=_structure(raw.get("cold", {}), defaults.cold, "cold"),
        t_hot=_number(raw.get("t_hot", defaults.t_hot), "t_hot"),
        t_cold=_number(raw.get("t_cold", defaults.t_cold), "t_cold"),
        p0_hot=p0_hot,
        p0_cold=p0_cold,
        sweep=_axes(raw["sweep"]) if "sweep" in raw else DEFAULT_AXES,
        tolerances=tol,
        format=fmt,
        kt_l=kt_l,
    )
    _check_semantics(config)
    return config


def _check_semantics(config: RunConfig) -> None:
    for side in ("hot", "cold"):
        s = getattr(config, side)
        try:
            LevelStructure(s.e0, s.delta_gap, s.broadening, s.rho if s.rho is not None else 1.0)
        except SpecError as exc:
            raise ConfigError(f"{side}: {exc}") from None
    report = validate_spec(config.spec())
    if not report.ok:
        raise ConfigError("; ".join(v.message for v in report.errors))
    if config.mode == "equilibrium" and {"p0_hot", "p0_cold"} & {a.param for a in config.sweep}:
        raise ConfigError("sweep.axes: occupations cannot be swept in equilibrium mode")


def parse_config(text: str) -> RunConfig:
    """Parse a JSON configuration document."""
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(raw)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: RunConfig) -> dict:
    def structure(s: StructureConfig) -> dict:
        out = {"delta_gap": s.delta_gap, "broadening": s.broadening}
        if s.rho is not None:
            out["rho"] = s.rho
        out["e0"] = s.e0
        return out

    out: dict[str, Any] = {
        "mode": config.mode,
        "hot": structure(config.hot),
        "cold": structure(config.cold),
        "t_hot": config.t_hot,
        "t_cold": config.t_cold,
    }
    if config.mode == "free":
        out["p0_hot"] = config.p0_hot
        out["p0_cold"] = config.p0_cold
    out["sweep"] = {
        "axes": [{"param": a.param, "min": a.min, "max": a.max, "count": a.count} for a in config.sweep]
    }
    t = config.tolerances
    out["tolerances"] = {"quad": t.quad, "match": t.match, "ladder": t.ladder}
    out["format"] = config.format
    out["kt_l"] = config.kt_l
    return out


def dump_config(config: RunConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2) + "\n"
