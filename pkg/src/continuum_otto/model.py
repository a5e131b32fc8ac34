"""Working-medium data model.

A level structure is one discrete level at ``e0`` followed, after a gap
``delta_gap``, by a flat continuum of width ``broadening`` and constant
density of states ``rho``.  Energies and temperatures are plain floats in
units where the Boltzmann constant is 1 and, by default, ``KT_l = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

RESCALING_RTOL = 1e-12

Severity = Literal["error", "warning"]


class SpecError(ValueError):
    """Raised when a structure or cycle specification is not usable."""


@dataclass(frozen=True)
class LevelStructure:
    e0: float
    delta_gap: float
    broadening: float
    rho: float

    def __post_init__(self):
        for name in ("e0", "delta_gap", "broadening", "rho"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise SpecError(f"{name} must be finite, got {value!r}")
        if self.broadening <= 0:
            raise SpecError(f"broadening must be > 0, got {self.broadening!r}")
        if self.rho <= 0:
            raise SpecError(f"rho must be > 0, got {self.rho!r}")
        if self.delta_gap < 0:
            raise SpecError(f"delta_gap must be >= 0, got {self.delta_gap!r}")

    @property
    def e_min(self) -> float:
        return self.e0 + self.delta_gap

    @property
    def e_max(self) -> float:
        return self.e_min + self.broadening

    @property
    def band_states(self) -> float:
        """Total number of continuum states, ``rho * broadening``."""
        return self.rho * self.broadening

    def scaled(self, c: float) -> "LevelStructure":
        """Multiply every energy by ``c``; ``rho`` scales as ``1/c``."""
        return LevelStructure(self.e0 * c, self.delta_gap * c, self.broadening * c, self.rho / c)


@dataclass(frozen=True)
class CycleSpec:
    """Hot and cold level structures plus the two reservoir temperatures.

    Construction does not enforce the cross-structure constraints so that a
    broken spec can still be reported on; use :func:`validate_spec` or
    :func:`require_valid`.
    """

    hot: LevelStructure
    cold: LevelStructure
    t_hot: float
    t_cold: float

    @property
    def beta_hot(self) -> float:
        return 1.0 / self.t_hot

    @property
    def beta_cold(self) -> float:
        return 1.0 / self.t_cold

    @property
    def x_hot(self) -> float:
        """Dimensionless hot broadening ``delta_h / KT_h``."""
        return self.hot.broadening / self.t_hot

    @property
    def x_cold(self) -> float:
        return self.cold.broadening / self.t_cold

    def scaled(self, c: float) -> "CycleSpec":
        return CycleSpec(self.hot.scaled(c), self.cold.scaled(c), self.t_hot * c, self.t_cold * c)


@dataclass(frozen=True)
class PopulationEndpoints:
    """Discrete-level occupations after the hot and cold isotherms."""

    p0_hot: float
    p0_cold: float
    mode: Literal["free", "equilibrium"] = "free"

    def __post_init__(self):
        for name in ("p0_hot", "p0_cold"):
            p = getattr(self, name)
            if not (0.0 < p < 1.0):
                raise SpecError(f"{name} must lie strictly inside (0, 1), got {p!r}")
        if self.mode not in ("free", "equilibrium"):
            raise SpecError(f"unknown population mode {self.mode!r}")


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    severity: Severity = "error"
    values: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "warning"]

    @property
    def ok(self) -> bool:
        """True when there is no hard violation (warnings allowed)."""
        return not self.errors

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self):
        return bool(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)


def rescaling_mismatch(spec: CycleSpec) -> float:
    """Relative mismatch of ``rho_h * delta_h`` against ``rho_l * delta_l``."""
    a = spec.hot.band_states
    b = spec.cold.band_states
    return abs(a - b) / max(abs(a), abs(b))


def validate_spec(spec: CycleSpec) -> ValidationReport:
    """Collect every violated invariant of ``spec``; never raises."""
    found: list[Violation] = []
    temps_ok = True
    for name in ("t_hot", "t_cold"):
        t = getattr(spec, name)
        if not (math.isfinite(t) and t > 0):
            temps_ok = False
            found.append(Violation("temperature", f"{name} must be finite and > 0", values={name: t}))

    mismatch = rescaling_mismatch(spec)
    if mismatch > RESCALING_RTOL:
        found.append(
            Violation(
                "rescaling constraint",
                "rho_h * broadening_h must equal rho_l * broadening_l "
                f"({spec.hot.band_states!r} != {spec.cold.band_states!r})",
                values={
                    "rho_h*broadening_h": spec.hot.band_states,
                    "rho_l*broadening_l": spec.cold.band_states,
                    "relative_mismatch": mismatch,
                },
            )
        )

    if spec.hot == spec.cold:
        found.append(
            Violation(
                "degenerate",
                "degenerate: zero-work cycle candidate (hot and cold structures identical)",
                severity="warning",
            )
        )
    if temps_ok and spec.t_hot < spec.t_cold:
        found.append(
            Violation(
                "temperature order",
                "t_hot < t_cold: the cycle cannot run as an engine in the usual sense",
                severity="warning",
                values={"t_hot": spec.t_hot, "t_cold": spec.t_cold},
            )
        )
    return ValidationReport(tuple(found))


def require_valid(spec: CycleSpec) -> CycleSpec:
    report = validate_spec(spec)
    if not report.ok:
        raise SpecError("; ".join(v.message for v in report.errors))
    return spec


def make_spec_from_broadenings(
    delta_gap_h: float,
    delta_h: float,
    delta_gap_l: float,
    delta_l: float,
    rho_h: float,
    t_hot: float,
    t_cold: float,
    e0_h: float = 0.0,
    e0_l: float = 0.0,
) -> CycleSpec:
    """Build a spec whose cold density of states follows from the rescaling
    constraint, ``rho_l = rho_h * delta_h / delta_l``."""
    for name, value in (("delta_h", delta_h), ("delta_l", delta_l), ("rho_h", rho_h),
                        ("t_hot", t_hot), ("t_cold", t_cold)):
        if not (math.isfinite(value) and value > 0):
            raise SpecError(f"{name} must be finite and > 0, got {value!r}")
    rho_l = rho_h * delta_h / delta_l
    hot = LevelStructure(e0_h, delta_gap_h, delta_h, rho_h)
    cold = LevelStructure(e0_l, delta_gap_l, delta_l, rho_l)
    return CycleSpec(hot, cold, t_hot, t_cold)
