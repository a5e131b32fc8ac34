"""Closed-form equilibrium quantities for one level structure.

Everything here is a function of a :class:`LevelStructure` and an inverse
temperature.  The ``(1 - exp(-beta*delta))`` factors that appear everywhere
are evaluated through ``expm1`` so that very hot sweeps (beta*delta ~ 1e-6)
keep full precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import LevelStructure, PopulationEndpoints, SpecError

# below this, band_shape and band_fraction switch to their Taylor series
SERIES_CUTOFF = 1e-2


class UnreachableOccupationError(ValueError):
    """No structure with a non-negative gap reaches the requested occupation."""


def _check_beta(beta: float) -> None:
    if not (math.isfinite(beta) and beta > 0):
        raise SpecError(f"inverse temperature must be finite and > 0, got {beta!r}")


def _one_minus_exp(x: float) -> float:
    """``1 - exp(-x)`` without cancellation for small ``x``."""
    return -math.expm1(-x)


def band_shape(x: float) -> float:
    r"""``g(x) = 1/(exp(-x) - 1) + 1/x``.

    The Boltzmann mean of a flat band of width ``delta`` at ``x = beta*delta``
    sits at ``E_max + delta * g(x)``.  ``g`` decreases monotonically from
    ``-1/2`` at ``x -> 0`` to ``-1`` at ``x -> inf``.
    """
    if x <= 0:
        raise SpecError(f"dimensionless broadening must be > 0, got {x!r}")
    if x < SERIES_CUTOFF:
        x2 = x * x
        return -0.5 - x / 12.0 + x * x2 / 720.0 - x * x2 * x2 / 30240.0 + x * x2 ** 3 / 1209600.0
    return 1.0 / math.expm1(-x) + 1.0 / x


def band_fraction(x: float) -> float:
    """Fractional position ``(<E> - E_min) / delta`` of the Boltzmann mean,
    i.e. ``1 + g(x)``, evaluated without cancellation at large ``x``."""
    if x <= 0:
        raise SpecError(f"dimensionless broadening must be > 0, got {x!r}")
    if x < SERIES_CUTOFF:
        x2 = x * x
        return 0.5 - x / 12.0 + x * x2 / 720.0 - x * x2 * x2 / 30240.0 + x * x2 ** 3 / 1209600.0
    return 1.0 / x - math.exp(-x) / _one_minus_exp(x)


def partition_function(structure: LevelStructure, beta: float) -> float:
    """``Z = exp(-beta*E0) + (rho/beta) * (exp(-beta*E_min) - exp(-beta*E_max))``."""
    _check_beta(beta)
    s = structure
    return math.exp(-beta * s.e0) + (s.rho / beta) * math.exp(-beta * s.e_min) * _one_minus_exp(
        beta * s.broadening
    )


def _continuum_to_discrete_ratio(structure: LevelStructure, beta: float) -> float:
    s = structure
    return (s.rho / beta) * math.exp(-beta * s.delta_gap) * _one_minus_exp(beta * s.broadening)


def equilibrium_p0(structure: LevelStructure, beta: float) -> float:
    """Thermal occupation of the discrete level, ``exp(-beta*E0) / Z``.

    Computed from the gap alone so it is exactly invariant under a global
    energy shift and cannot overflow for large negative ``E0``.
    """
    _check_beta(beta)
    return 1.0 / (1.0 + _continuum_to_discrete_ratio(structure, beta))


def continuum_mean_energy(structure: LevelStructure, beta: float) -> float:
    """Boltzmann mean energy inside the continuum band at ``beta``."""
    _check_beta(beta)
    s = structure
    return s.e_min + s.broadening * band_fraction(beta * s.broadening)


@dataclass(frozen=True)
class CornerState:
    """State of the medium at one corner of the cycle.

    The continuum is Boltzmann-shaped at ``beta`` across the band of
    ``structure`` and carries total weight ``1 - p0``.  ``norm`` is the
    constant ``Z`` for which ``1 - p0 = (rho/Z) * int exp(-beta*E) dE``; it
    equals the ordinary partition function only when ``p0`` is thermal.
    """

    structure: LevelStructure
    beta: float
    p0: float
    norm: float
    continuum_mean: float
    mean_energy: float


def corner_state(structure: LevelStructure, beta: float, p0: float) -> CornerState:
    _check_beta(beta)
    if not (0.0 < p0 < 1.0):
        raise SpecError(f"p0 must lie strictly inside (0, 1), got {p0!r}")
    s = structure
    continuum = (s.rho / beta) * math.exp(-beta * s.e_min) * _one_minus_exp(beta * s.broadening)
    mean_c = continuum_mean_energy(s, beta)
    return CornerState(
        structure=s,
        beta=beta,
        p0=p0,
        norm=continuum / (1.0 - p0),
        continuum_mean=mean_c,
        mean_energy=p0 * s.e0 + (1.0 - p0) * mean_c,
    )


def solve_gap_for_p0(target_p0: float, broadening: float, rho: float, beta: float) -> float:
    """Gap ``Delta`` for which the thermal occupation equals ``target_p0``.

    Raises :class:`UnreachableOccupationError` when the required gap is
    negative, i.e. even a continuum touching the discrete level holds too
    little weight.
    """
    _check_beta(beta)
    if not (0.0 < target_p0 < 1.0):
        raise SpecError(f"target_p0 must lie strictly inside (0, 1), got {target_p0!r}")
    if not (broadening > 0 and rho > 0):
        raise SpecError("broadening and rho must be > 0")
    log_arg = (
        math.log(beta) + math.log1p(-target_p0)
        - math.log(target_p0) - math.log(rho) - math.log(_one_minus_exp(beta * broadening))
    )
    gap = -log_arg / beta
    if gap < 0:
        # rounding noise around a zero gap
        if gap > -1e-12 * (1.0 / beta + broadening):
            return 0.0
        raise UnreachableOccupationError(
            f"unreachable occupation: p0={target_p0!r} needs gap {gap!r} < 0"
        )
    return gap


def equilibrium_endpoints(spec) -> PopulationEndpoints:
    """Thermal occupations of the hot structure at ``T_h`` and the cold
    structure at ``T_l``."""
    return PopulationEndpoints(
        p0_hot=equilibrium_p0(spec.hot, spec.beta_hot),
        p0_cold=equilibrium_p0(spec.cold, spec.beta_cold),
        mode="equilibrium",
    )
