"""Thermodynamics of an Otto heat engine whose working medium is one
discrete level plus a flat continuum band.

Closed forms live in :mod:`equilibrium` and :mod:`cycle`; every one of them
is cross-checked by the independent oracles in :mod:`oracle`.
"""

from .model import (
    CycleSpec,
    LevelStructure,
    PopulationEndpoints,
    SpecError,
    ValidationReport,
    make_spec_from_broadenings,
    validate_spec,
)
from .equilibrium import (
    CornerState,
    UnreachableOccupationError,
    continuum_mean_energy,
    corner_state,
    equilibrium_endpoints,
    equilibrium_p0,
    partition_function,
    solve_gap_for_p0,
)
from .cycle import (
    BranchLedger,
    CycleResult,
    DegenerateCycleError,
    adiabatic_energy_map,
    branch_work_2,
    branch_work_4,
    engine_f,
    efficiency,
    heat_aggregates,
    limit_frozen_population_work,
    limit_high_temperature_work,
    limit_two_level_work,
    net_work,
    run_cycle,
)

__all__ = [
    "BranchLedger",
    "CornerState",
    "CycleResult",
    "CycleSpec",
    "DegenerateCycleError",
    "LevelStructure",
    "PopulationEndpoints",
    "SpecError",
    "UnreachableOccupationError",
    "ValidationReport",
    "adiabatic_energy_map",
    "branch_work_2",
    "branch_work_4",
    "continuum_mean_energy",
    "corner_state",
    "efficiency",
    "engine_f",
    "equilibrium_endpoints",
    "equilibrium_p0",
    "heat_aggregates",
    "limit_frozen_population_work",
    "limit_high_temperature_work",
    "limit_two_level_work",
    "make_spec_from_broadenings",
    "net_work",
    "partition_function",
    "run_cycle",
    "solve_gap_for_p0",
    "validate_spec",
]

__version__ = "0.1.0"
