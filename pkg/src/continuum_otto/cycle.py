"""Closed-form Otto-cycle thermodynamics for the discrete-plus-continuum medium.

Corners of the cycle:

* A: hot structure, ``p0 = p0_cold``, continuum shaped at ``beta_cold``
* B: hot structure, ``p0 = p0_hot``, continuum shaped at ``beta_hot``
* C: cold structure, ``p0 = p0_hot``, continuum shaped at ``beta_hot``
* D: cold structure, ``p0 = p0_cold``, continuum shaped at ``beta_cold``

Branches 1 (A->B) and 3 (C->D) are isotherms at fixed structure; branches
2 (B->C) and 4 (D->A) swap the structure with the discrete occupation frozen.
``work_out`` is always the work delivered *by* the medium, so the net work is
the plain sum of the branch-2 and branch-4 values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .equilibrium import CornerState, band_shape, corner_state
from .model import CycleSpec, PopulationEndpoints, SpecError, require_valid

MAP_TOL = 1e-12


class DegenerateCycleError(ArithmeticError):
    """The heat absorbed on the hot side vanishes, so no efficiency exists."""


@dataclass(frozen=True)
class BranchLedger:
    branch_id: int
    delta_u: float
    work_out: float
    heat_in: float

    @classmethod
    def from_first_law(cls, branch_id: int, delta_u: float, work_out: float) -> "BranchLedger":
        return cls(branch_id, delta_u, work_out, delta_u + work_out)


@dataclass(frozen=True)
class CycleResult:
    spec: CycleSpec
    endpoints: PopulationEndpoints
    corners: dict[str, CornerState]
    ledgers: tuple[BranchLedger, BranchLedger, BranchLedger, BranchLedger]
    net_work: float
    heat_in_total: float
    heat_out_total: float
    efficiency: float | None
    engine_f: float
    carnot_efficiency: float
    diagnostics: tuple[str, ...] = field(default_factory=tuple)


# --- adiabatic map ------------------------------------------------------------


def adiabatic_energy_map(spec: CycleSpec, e_hot: float) -> float:
    """Carry a hot-band energy to its cold-band image at the same fractional
    band position."""
    h, c = spec.hot, spec.cold
    slack = MAP_TOL * max(1.0, abs(h.e_min), abs(h.e_max))
    if not (h.e_min - slack <= e_hot <= h.e_max + slack):
        raise SpecError(f"energy {e_hot!r} lies outside the hot band [{h.e_min!r}, {h.e_max!r}]")
    return (h.rho / c.rho) * (e_hot - h.e_min) + c.e_min


def inverse_adiabatic_energy_map(spec: CycleSpec, e_cold: float) -> float:
    h, c = spec.hot, spec.cold
    slack = MAP_TOL * max(1.0, abs(c.e_min), abs(c.e_max))
    if not (c.e_min - slack <= e_cold <= c.e_max + slack):
        raise SpecError(f"energy {e_cold!r} lies outside the cold band [{c.e_min!r}, {c.e_max!r}]")
    return (c.rho / h.rho) * (e_cold - c.e_min) + h.e_min


# --- branch works -------------------------------------------------------------


def _check_p(name: str, p: float) -> None:
    if not (0.0 < p < 1.0):
        raise SpecError(f"{name} must lie strictly inside (0, 1), got {p!r}")


def _stroke_work(spec: CycleSpec, p0: float, x_eff: float) -> float:
    # work released when the structure goes hot -> cold with the continuum
    # Boltzmann-shaped (in hot-band coordinates) at dimensionless width x_eff
    h, c = spec.hot, spec.cold
    discrete = p0 * (h.e0 - c.e0)
    shift = (1.0 - p0) * (h.rho * h.e_min - c.rho * c.e_min) / c.rho
    stretch = (1.0 - p0) * ((c.rho - h.rho) / c.rho) * (h.e_max + h.broadening * band_shape(x_eff))
    return discrete + shift + stretch


def branch_work_2(spec: CycleSpec, p0_hot: float) -> float:
    """Work delivered by the medium on the B -> C stroke."""
    require_valid(spec)
    _check_p("p0_hot", p0_hot)
    return _stroke_work(spec, p0_hot, spec.beta_hot * spec.hot.broadening)


def branch_work_4(spec: CycleSpec, p0_cold: float) -> float:
    """Work delivered by the medium on the D -> A stroke (usually negative).

    The state-D continuum, pulled back into hot-band coordinates, is
    Boltzmann-shaped at the effective inverse temperature
    ``beta_cold * rho_h / rho_l``.
    """
    require_valid(spec)
    _check_p("p0_cold", p0_cold)
    x_eff = spec.beta_cold * (spec.hot.rho / spec.cold.rho) * spec.hot.broadening
    return -_stroke_work(spec, p0_cold, x_eff)


# --- the engine function and net work -----------------------------------------


def engine_f(p0_hot: float, p0_cold: float, x_hot: float, x_cold: float) -> float:
    """``(1 - p0_hot) g(x_hot) - (1 - p0_cold) g(x_cold)``.

    ``x_hot = delta_h / KT_h`` and ``x_cold = delta_l / KT_l``.  Occupations
    may touch 0 or 1 here; the frozen-population limit evaluates ``f`` at
    ``p0 = 0``.
    """
    for name, p in (("p0_hot", p0_hot), ("p0_cold", p0_cold)):
        if not (0.0 <= p <= 1.0):
            raise SpecError(f"{name} must lie in [0, 1], got {p!r}")
    return (1.0 - p0_hot) * band_shape(x_hot) - (1.0 - p0_cold) * band_shape(x_cold)


def _f(spec: CycleSpec, ends: PopulationEndpoints) -> float:
    return engine_f(ends.p0_hot, ends.p0_cold, spec.x_hot, spec.x_cold)


def _span(s) -> float:
    return s.delta_gap + s.broadening


def _span_difference(spec: CycleSpec) -> float:
    # grouped so that equal broadenings give exactly delta_gap_h - delta_gap_l
    h, c = spec.hot, spec.cold
    return (h.delta_gap - c.delta_gap) + (h.broadening - c.broadening)


def net_work(spec: CycleSpec, endpoints: PopulationEndpoints) -> float:
    require_valid(spec)
    dp = endpoints.p0_cold - endpoints.p0_hot
    h, c = spec.hot, spec.cold
    return dp * _span_difference(spec) + (h.broadening - c.broadening) * _f(spec, endpoints)


def heat_aggregates(spec: CycleSpec, endpoints: PopulationEndpoints) -> tuple[float, float]:
    """Heat absorbed on branches 1+4 and released on branches 2+3."""
    require_valid(spec)
    dp = endpoints.p0_cold - endpoints.p0_hot
    f = _f(spec, endpoints)
    heat_in = dp * _span(spec.hot) + spec.hot.broadening * f
    heat_out = dp * _span(spec.cold) + spec.cold.broadening * f
    return heat_in, heat_out


def _heat_in_scale(spec: CycleSpec, endpoints: PopulationEndpoints) -> float:
    dp = endpoints.p0_cold - endpoints.p0_hot
    return abs(dp) * _span(spec.hot) + spec.hot.broadening * abs(_f(spec, endpoints))


def efficiency(spec: CycleSpec, endpoints: PopulationEndpoints) -> float:
    """``1 - heat_out / heat_in``; raises :class:`DegenerateCycleError` when
    the absorbed heat vanishes to rounding."""
    heat_in, heat_out = heat_aggregates(spec, endpoints)
    if abs(heat_in) <= 1e-13 * _heat_in_scale(spec, endpoints) or heat_in == 0.0:
        raise DegenerateCycleError(f"degenerate cycle: absorbed heat {heat_in!r} is zero")
    return 1.0 - heat_out / heat_in


# --- limiting cases -----------------------------------------------------------


def limit_two_level_work(spec: CycleSpec, endpoints: PopulationEndpoints) -> float:
    """Net work when the broadening is unchanged over the cycle."""
    dp = endpoints.p0_cold - endpoints.p0_hot
    return dp * (spec.hot.delta_gap - spec.cold.delta_gap)


def limit_high_temperature_work(spec: CycleSpec, endpoints: PopulationEndpoints) -> float:
    """High-temperature net work as a two-level engine with gaps
    ``Delta + delta``.  This drops the ``(delta_h - delta_l)(p0_h - p0_l)/2``
    term that the exact expression keeps as ``x -> 0``."""
    dp = endpoints.p0_cold - endpoints.p0_hot
    return dp * _span_difference(spec)


def limit_high_temperature_efficiency(spec: CycleSpec) -> float:
    return 1.0 - _span(spec.cold) / _span(spec.hot)


def limit_frozen_population_work(spec: CycleSpec, p: float) -> float:
    """Net work with no population transfer, ``p0_hot = p0_cold = p``."""
    if not (0.0 <= p <= 1.0):
        raise SpecError(f"p must lie in [0, 1], got {p!r}")
    f0 = engine_f(0.0, 0.0, spec.x_hot, spec.x_cold)
    return (spec.hot.broadening - spec.cold.broadening) * (1.0 - p) * f0


def work_difference(spec: CycleSpec, endpoints: PopulationEndpoints) -> float:
    """``net_work - limit_two_level_work`` in factorized form,
    ``(delta_h - delta_l) * ((p0_cold - p0_hot) + f)``."""
    dp = endpoints.p0_cold - endpoints.p0_hot
    return (spec.hot.broadening - spec.cold.broadening) * (dp + _f(spec, endpoints))


# --- full cycle ---------------------------------------------------------------


def cycle_corners(spec: CycleSpec, endpoints: PopulationEndpoints) -> dict[str, CornerState]:
    bh, bl = spec.beta_hot, spec.beta_cold
    return {
        "A": corner_state(spec.hot, bl, endpoints.p0_cold),
        "B": corner_state(spec.hot, bh, endpoints.p0_hot),
        "C": corner_state(spec.cold, bh, endpoints.p0_hot),
        "D": corner_state(spec.cold, bl, endpoints.p0_cold),
    }


def ledgers_from_corners(
    energies: dict[str, float], work_2: float, work_4: float
) -> tuple[BranchLedger, BranchLedger, BranchLedger, BranchLedger]:
    """Assemble the four branch ledgers from corner mean energies."""
    u = energies
    return (
        BranchLedger.from_first_law(1, u["B"] - u["A"], 0.0),
        BranchLedger.from_first_law(2, u["C"] - u["B"], work_2),
        BranchLedger.from_first_law(3, u["D"] - u["C"], 0.0),
        BranchLedger.from_first_law(4, u["A"] - u["D"], work_4),
    )


def run_cycle(spec: CycleSpec, endpoints: PopulationEndpoints) -> CycleResult:
    """Evaluate every closed form for one cycle."""
    require_valid(spec)
    corners = cycle_corners(spec, endpoints)
    w2 = branch_work_2(spec, endpoints.p0_hot)
    w4 = branch_work_4(spec, endpoints.p0_cold)
    ledgers = ledgers_from_corners({k: s.mean_energy for k, s in corners.items()}, w2, w4)

    heat_in, heat_out = heat_aggregates(spec, endpoints)
    carnot = 1.0 - spec.t_cold / spec.t_hot
    diagnostics = []
    eta: float | None
    try:
        eta = efficiency(spec, endpoints)
    except DegenerateCycleError as exc:
        eta = None
        diagnostics.append(str(exc))
    if eta is not None and heat_in < 0:
        diagnostics.append(
            f"efficiency undefined: absorbed heat {heat_in!r} < 0, the cycle is not running as an engine"
        )
        eta = None
    if endpoints.mode == "equilibrium" and eta is not None:
        within = eta <= carnot + 1e-12
        diagnostics.append(
            f"carnot check: eta={eta!r} {'<=' if within else '>'} 1 - T_l/T_h={carnot!r}"
        )

    return CycleResult(
        spec=spec,
        endpoints=endpoints,
        corners=corners,
        ledgers=ledgers,
        net_work=net_work(spec, endpoints),
        heat_in_total=heat_in,
        heat_out_total=heat_out,
        efficiency=eta,
        engine_f=_f(spec, endpoints),
        carnot_efficiency=carnot,
        diagnostics=tuple(diagnostics),
    )
