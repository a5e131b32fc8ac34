"""Independent numerical ground truth for the closed forms.

Two roads, neither of which calls the closed-form helpers in
:mod:`equilibrium` or :mod:`cycle`:

* :func:`oracle_branch_quantities` integrates the defining integrals
  (normalizations, microstate-transport work integrals, corner energies)
  with adaptive Gauss-Kronrod quadrature.
* :func:`ladder_oracle` replaces each continuum by ``n`` discrete levels and
  runs the ordinary discrete-level bookkeeping with finite sums.

:func:`run_verification` compares both against the closed forms and
assembles an :class:`OracleReport`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from . import cycle as closed
from .cycle import BranchLedger, ledgers_from_corners
from .model import CycleSpec, LevelStructure, PopulationEndpoints, validate_spec
from .quadrature import quad_integrate


@dataclass(frozen=True)
class OracleCycle:
    """Cycle bookkeeping produced by one of the numerical oracles."""

    ledgers: tuple[BranchLedger, BranchLedger, BranchLedger, BranchLedger]
    corner_energies: dict[str, float]
    p0_hot: float
    p0_cold: float
    work_2: float
    work_4: float
    net_work: float
    heat_in_total: float
    heat_out_total: float
    efficiency: float | None


def _assemble(corner_energies, p0_hot, p0_cold, w2, w4) -> OracleCycle:
    ledgers = ledgers_from_corners(corner_energies, w2, w4)
    heat_in = ledgers[0].heat_in + ledgers[3].heat_in
    heat_out = -(ledgers[1].heat_in + ledgers[2].heat_in)
    eta = None if heat_in == 0.0 else 1.0 - heat_out / heat_in
    return OracleCycle(
        ledgers=ledgers,
        corner_energies=dict(corner_energies),
        p0_hot=p0_hot,
        p0_cold=p0_cold,
        work_2=w2,
        work_4=w4,
        net_work=w2 + w4,
        heat_in_total=heat_in,
        heat_out_total=heat_out,
        efficiency=eta,
    )


# --- quadrature road ----------------------------------------------------------


def _boltzmann(beta: float, ref: float):
    # exp(-beta*E) rescaled by exp(beta*ref); the factor cancels in every ratio
    return lambda e: math.exp(-beta * (e - ref))


def quad_normalization(structure: LevelStructure, beta: float, p0: float, tol: float) -> float:
    """``Z`` with ``1 - p0 = (rho/Z) int exp(-beta*(E - E_min)) dE`` over the band."""
    s = structure
    w = _boltzmann(beta, s.e_min)
    return s.rho * quad_integrate(w, s.e_min, s.e_max, tol) / (1.0 - p0)


def quad_corner_energy(structure: LevelStructure, beta: float, p0: float, tol: float) -> float:
    s = structure
    w = _boltzmann(beta, s.e_min)
    z = quad_normalization(s, beta, p0, tol)
    continuum = quad_integrate(lambda e: s.rho / z * w(e) * e, s.e_min, s.e_max, tol)
    return p0 * s.e0 + continuum


def quad_partition_function(structure: LevelStructure, beta: float, tol: float = 1e-12) -> float:
    s = structure
    return math.exp(-beta * s.e0) + s.rho * quad_integrate(
        lambda e: math.exp(-beta * e), s.e_min, s.e_max, tol
    )


def oracle_branch_quantities(
    spec: CycleSpec, endpoints: PopulationEndpoints, tol: float = 1e-12
) -> OracleCycle:
    """Branch ledgers from the defining integrals.

    Stroke works transport every continuum microstate along the affine band
    map and integrate the energy it releases, weighted by the distribution
    the medium carries into the stroke (state B for branch 2, state D pulled
    back to hot-band coordinates for branch 4).
    """
    h, c = spec.hot, spec.cold
    bh, bl = spec.beta_hot, spec.beta_cold
    ph, pl = endpoints.p0_hot, endpoints.p0_cold
    slope = h.rho / c.rho

    def band_map(e):
        return slope * (e - h.e_min) + c.e_min

    # E - map(E) cancels down to rounding when the two bands nearly
    # coincide, so accuracy is measured against the energies being
    # subtracted rather than against the (possibly vanishing) result
    magnitude = max(abs(h.e_min), abs(h.e_max), abs(c.e_min), abs(c.e_max))
    floor = tol * magnitude

    z_hh = quad_normalization(h, bh, ph, tol)
    w_b = _boltzmann(bh, h.e_min)
    transport_2 = quad_integrate(
        lambda e: h.rho / z_hh * w_b(e) * (e - band_map(e)), h.e_min, h.e_max, tol,
        abs_tol=floor * (1.0 - ph),
    )
    w2 = ph * (h.e0 - c.e0) + transport_2

    z_ll = quad_normalization(c, bl, pl, tol)
    w_d = _boltzmann(bl, c.e_min)
    transport_4 = quad_integrate(
        lambda e: h.rho / z_ll * w_d(band_map(e)) * (e - band_map(e)), h.e_min, h.e_max, tol,
        abs_tol=floor * (1.0 - pl),
    )
    w4 = -(pl * (h.e0 - c.e0) + transport_4)

    energies = {
        "A": quad_corner_energy(h, bl, pl, tol),
        "B": quad_corner_energy(h, bh, ph, tol),
        "C": quad_corner_energy(c, bh, ph, tol),
        "D": quad_corner_energy(c, bl, pl, tol),
    }
    return _assemble(energies, ph, pl, w2, w4)


# --- ladder road --------------------------------------------------------------

Placement = Literal["midpoint", "left"]


def ladder_levels(structure: LevelStructure, n_levels: int, placement: Placement = "midpoint"):
    """Energies and per-level degeneracy of an ``n``-level ladder that
    replaces the continuum."""
    offset = {"midpoint": 0.5, "left": 0.0}[placement]
    frac = (np.arange(n_levels, dtype=float) + offset) / n_levels
    energies = structure.e_min + frac * structure.broadening
    degeneracy = structure.rho * structure.broadening / n_levels
    return energies, degeneracy


def _ladder_pops(energies, degeneracy, beta, p0):
    w = degeneracy * np.exp(-beta * (energies - energies[0]))
    return (1.0 - p0) * w / w.sum()


def ladder_p0(structure: LevelStructure, beta: float, n_levels: int,
              placement: Placement = "midpoint") -> float:
    """Thermal discrete-level occupation from the finite partition sum."""
    energies, d = ladder_levels(structure, n_levels, placement)
    continuum = (d * np.exp(-beta * (energies - structure.e0))).sum()
    return 1.0 / (1.0 + continuum)


def ladder_oracle(
    spec: CycleSpec,
    endpoints: PopulationEndpoints,
    n_levels: int,
    placement: Placement = "midpoint",
) -> OracleCycle:
    """Cycle bookkeeping with each continuum replaced by ``n_levels`` levels.

    Level ``k`` of the hot ladder is carried to level ``k`` of the cold
    ladder on the adiabatic strokes.  In equilibrium mode the discrete
    occupations come from the ladder's own partition sums.
    """
    if n_levels < 2:
        raise ValueError(f"n_levels must be >= 2, got {n_levels!r}")
    h, c = spec.hot, spec.cold
    bh, bl = spec.beta_hot, spec.beta_cold
    eh, dh = ladder_levels(h, n_levels, placement)
    el, dl = ladder_levels(c, n_levels, placement)

    if endpoints.mode == "equilibrium":
        ph = ladder_p0(h, bh, n_levels, placement)
        pl = ladder_p0(c, bl, n_levels, placement)
    else:
        ph, pl = endpoints.p0_hot, endpoints.p0_cold

    pops = {
        "A": _ladder_pops(eh, dh, bl, pl),
        "B": _ladder_pops(eh, dh, bh, ph),
        "C": _ladder_pops(el, dl, bh, ph),
        "D": _ladder_pops(el, dl, bl, pl),
    }
    energies = {
        "A": pl * h.e0 + math.fsum(pops["A"] * eh),
        "B": ph * h.e0 + math.fsum(pops["B"] * eh),
        "C": ph * c.e0 + math.fsum(pops["C"] * el),
        "D": pl * c.e0 + math.fsum(pops["D"] * el),
    }
    # populations frozen while the levels move
    w2 = ph * (h.e0 - c.e0) + math.fsum(pops["B"] * (eh - el))
    w4 = pl * (c.e0 - h.e0) + math.fsum(pops["D"] * (el - eh))
    return _assemble(energies, ph, pl, w2, w4)


# --- comparison report --------------------------------------------------------


@dataclass(frozen=True)
class VerificationConfig:
    quad_tol: float = 1e-12
    match_tol: float = 1e-9
    ladder_levels: int = 4096
    ladder_tol: float = 1e-5
    high_t_scales: tuple[float, ...] = (1e2, 1e3)


def relative_error(value: float, reference: float, scale: float = 0.0) -> float:
    """``|value - reference| / max(|reference|, scale)``; 0 when both vanish."""
    denom = max(abs(reference), scale)
    diff = abs(value - reference)
    if denom == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / denom


@dataclass(frozen=True)
class OracleEntry:
    name: str
    closed_form_value: float
    quadrature_value: float
    ladder_value: float | None
    ladder_levels: int | None
    abs_error: float
    rel_error: float
    ladder_abs_error: float | None
    ladder_rel_error: float | None
    passed: bool


@dataclass
class OracleReport:
    entries: list[OracleEntry] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    validation: list[str] = field(default_factory=list)
    passed: bool = True

    def entry(self, name: str) -> OracleEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "validation": list(self.validation),
            "entries": [asdict(e) for e in sorted(self.entries, key=lambda e: e.name)],
            "notes": list(self.notes),
        }


def energy_scale(spec: CycleSpec) -> float:
    """Characteristic energy of a cycle, used as a floor in relative errors."""
    h, c = spec.hot, spec.cold
    return max(h.delta_gap + h.broadening, c.delta_gap + c.broadening)


def _compare(name, closed_value, quad_value, ladder_value, n_levels, ladder_scale, config) -> OracleEntry:
    # quadrature is held to a plain relative error; the ladder is a
    # second-order discretization, so its error is measured against
    # max(|value|, ladder_scale) and gates only when ladder_scale > 0
    abs_err = abs(closed_value - quad_value)
    rel = relative_error(closed_value, quad_value)
    passed = rel <= config.match_tol
    l_abs = l_rel = None
    if ladder_value is not None:
        l_abs = abs(ladder_value - closed_value)
        l_rel = relative_error(ladder_value, closed_value, ladder_scale)
        if ladder_scale > 0:
            passed = passed and l_rel <= config.ladder_tol
    return OracleEntry(name, closed_value, quad_value, ladder_value,
                       n_levels if ladder_value is not None else None,
                       abs_err, rel, l_abs, l_rel, passed)


def closed_form_quantities(spec: CycleSpec, endpoints: PopulationEndpoints) -> dict[str, float | None]:
    """The closed-form values every oracle is compared against."""
    heat_in, heat_out = closed.heat_aggregates(spec, endpoints)
    try:
        eta = closed.efficiency(spec, endpoints)
    except closed.DegenerateCycleError:
        eta = None
    corners = closed.cycle_corners(spec, endpoints)
    out = {
        "branch_work_2": closed.branch_work_2(spec, endpoints.p0_hot),
        "branch_work_4": closed.branch_work_4(spec, endpoints.p0_cold),
        "net_work": closed.net_work(spec, endpoints),
        "heat_in_total": heat_in,
        "heat_out_total": heat_out,
        "efficiency": eta,
    }
    for k, s in corners.items():
        out[f"corner_energy_{k}"] = s.mean_energy
    return out


def oracle_quantities(result: OracleCycle) -> dict[str, float | None]:
    out = {
        "branch_work_2": result.work_2,
        "branch_work_4": result.work_4,
        "net_work": result.net_work,
        "heat_in_total": result.heat_in_total,
        "heat_out_total": result.heat_out_total,
        "efficiency": result.efficiency,
    }
    for k, u in result.corner_energies.items():
        out[f"corner_energy_{k}"] = u
    return out


def run_verification(
    spec: CycleSpec,
    endpoints: PopulationEndpoints | None = None,
    config: VerificationConfig | None = None,
) -> OracleReport:
    """Compare every closed form against both oracles for one cycle."""
    from .equilibrium import equilibrium_endpoints

    config = config or VerificationConfig()
    report = OracleReport()
    validation = validate_spec(spec)
    report.validation = [f"{v.severity}: {v.message}" for v in validation]
    if not validation.ok:
        report.passed = False
        report.notes.append("validation failed: no comparisons run")
        return report
    if endpoints is None:
        endpoints = equilibrium_endpoints(spec)

    cf = closed_form_quantities(spec, endpoints)
    quad = oracle_quantities(oracle_branch_quantities(spec, endpoints, config.quad_tol))
    ladder = oracle_quantities(ladder_oracle(spec, endpoints, config.ladder_levels))
    e_scale = energy_scale(spec)

    for name in sorted(cf):
        c_val, q_val, l_val = cf[name], quad[name], ladder[name]
        if c_val is None or q_val is None:
            report.notes.append(f"{name}: undefined (absorbed heat vanishes), not compared")
            continue
        # the ladder efficiency is ill-conditioned where the absorbed heat is small: recorded only
        ladder_scale = 0.0 if name == "efficiency" else e_scale
        report.entries.append(_compare(name, c_val, q_val, l_val, config.ladder_levels, ladder_scale, config))

    _branch_decomposition_notes(report, spec, endpoints, config)
    _reduction_notes(report, spec, endpoints)
    _high_temperature_notes(report, spec, endpoints, config)
    if endpoints.mode == "equilibrium":
        _carnot_note(report, spec, endpoints)
    report.passed = all(e.passed for e in report.entries)
    return report


def _branch_decomposition_notes(report, spec, endpoints, config):
    oc = oracle_branch_quantities(spec, endpoints, config.quad_tol)
    heat_in, heat_out = closed.heat_aggregates(spec, endpoints)
    hot_side = oc.ledgers[0].heat_in + oc.ledgers[3].heat_in
    cold_side = -(oc.ledgers[1].heat_in + oc.ledgers[2].heat_in)
    report.notes.append(
        "branch decomposition: heat_in(1)+heat_in(4) = "
        f"{hot_side!r} vs absorbed-heat closed form {heat_in!r} "
        f"(rel {relative_error(hot_side, heat_in)!r})"
    )
    report.notes.append(
        "branch decomposition: -(heat_in(2)+heat_in(3)) = "
        f"{cold_side!r} vs released-heat closed form {heat_out!r} "
        f"(rel {relative_error(cold_side, heat_out)!r})"
    )
    stroke_heats = (oc.ledgers[1].heat_in, oc.ledgers[3].heat_in)
    report.notes.append(
        f"stroke heats (continuum redistribution): branch 2 {stroke_heats[0]!r}, branch 4 {stroke_heats[1]!r}"
    )


def _reduction_notes(report, spec, endpoints):
    w = closed.net_work(spec, endpoints)
    if spec.hot.broadening == spec.cold.broadening:
        two_level = closed.limit_two_level_work(spec, endpoints)
        gap = abs(w - two_level)
        word = "exact" if gap == 0.0 else f"residual {gap!r}"
        report.notes.append(f"two-level reduction {word}: net_work {w!r} vs {two_level!r}")
    if endpoints.p0_hot == endpoints.p0_cold:
        frozen = closed.limit_frozen_population_work(spec, endpoints.p0_hot)
        report.notes.append(
            f"frozen-population reduction: net_work {w!r} vs {frozen!r} (abs {abs(w - frozen)!r})"
        )
        try:
            eta = closed.efficiency(spec, endpoints)
            target = 1.0 - spec.cold.broadening / spec.hot.broadening
            report.notes.append(
                f"frozen-population efficiency: {eta!r} vs 1 - delta_l/delta_h = {target!r}"
            )
        except closed.DegenerateCycleError:
            pass


def high_temperature_gap(spec: CycleSpec, endpoints: PopulationEndpoints, scale: float) -> dict:
    """Exact minus high-temperature-limit work and efficiency with both
    reservoirs at ``KT = scale * delta`` (so ``x_h = x_l = 1/scale``)."""
    hot_spec = CycleSpec(spec.hot, spec.cold, scale * spec.hot.broadening, scale * spec.cold.broadening)
    exact = closed.net_work(hot_spec, endpoints)
    printed = closed.limit_high_temperature_work(hot_spec, endpoints)
    asymptote = (spec.hot.broadening - spec.cold.broadening) * (endpoints.p0_hot - endpoints.p0_cold) / 2
    out = {
        "scale": scale,
        "work_exact": exact,
        "work_limit": printed,
        "work_gap": exact - printed,
        "work_gap_asymptote": asymptote,
    }
    try:
        out["efficiency_exact"] = closed.efficiency(hot_spec, endpoints)
        out["efficiency_limit"] = closed.limit_high_temperature_efficiency(hot_spec)
        out["efficiency_gap"] = out["efficiency_exact"] - out["efficiency_limit"]
    except closed.DegenerateCycleError:
        pass
    return out


def _high_temperature_notes(report, spec, endpoints, config):
    for s in config.high_t_scales:
        gap = high_temperature_gap(spec, endpoints, s)
        line = (
            f"high-temperature gap at KT={s:g}*delta: work exact {gap['work_exact']!r} "
            f"- limit {gap['work_limit']!r} = {gap['work_gap']!r} "
            f"(x->0 asymptote {gap['work_gap_asymptote']!r})"
        )
        if "efficiency_gap" in gap:
            line += f"; efficiency gap {gap['efficiency_gap']!r}"
        report.notes.append(line)


def _carnot_note(report, spec, endpoints):
    try:
        eta = closed.efficiency(spec, endpoints)
    except closed.DegenerateCycleError:
        return
    carnot = 1.0 - spec.t_cold / spec.t_hot
    status = "within" if eta <= carnot + 1e-12 else "exceeds"
    report.notes.append(f"carnot check (equilibrium mode): eta {eta!r} {status} bound {carnot!r}")
