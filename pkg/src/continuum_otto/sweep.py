"""Parameter sweeps over linear grids.

A grid point is a flat parameter map (see :data:`PARAMETERS`); the cold
density of states is always re-derived from the rescaling constraint, so any
broadening may be swept freely.  Cells are independent pure evaluations and
are assembled by row-major index, which keeps the output bit-identical no
matter how the work is scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Literal

import numpy as np

from . import cycle
from .equilibrium import equilibrium_endpoints
from .model import PopulationEndpoints, SpecError, make_spec_from_broadenings

PARAMETERS = (
    "gap_h", "delta_h", "gap_l", "delta_l", "rho_h",
    "t_hot", "t_cold", "e0_h", "e0_l", "p0_hot", "p0_cold",
)

# the plotted work-difference surface
FIG3_DEFAULTS = {
    "gap_h": 1.0, "delta_h": 2.0, "gap_l": 1.0, "delta_l": 1.0, "rho_h": 1.0,
    "t_hot": 5.0, "t_cold": 1.0, "e0_h": 0.0, "e0_l": 0.0,
    "p0_hot": 0.3, "p0_cold": 0.5,
}

STATUS_OK = "ok"
STATUS_INVALID = "invalid-spec"
STATUS_NO_EFFICIENCY = "undefined-efficiency"

QUANTITIES = ("net_work", "heat_in", "heat_out", "efficiency", "work_diff")


class NoFeasibleCellError(ValueError):
    """Every cell of the grid is invalid for the requested objective."""


@dataclass(frozen=True)
class Axis:
    param: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.param not in PARAMETERS:
            raise SpecError(f"unknown sweep parameter {self.param!r}; expected one of {PARAMETERS}")
        if self.count < 1:
            raise SpecError(f"axis {self.param}: count must be >= 1")
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.max < self.min:
            raise SpecError(f"axis {self.param}: need finite min <= max")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.min)])
        return np.linspace(self.min, self.max, self.count)


DEFAULT_AXES = (Axis("delta_h", 0.05, 5.0, 101), Axis("delta_l", 0.05, 5.0, 101))


@dataclass(frozen=True)
class GridConfig:
    axes: tuple[Axis, ...] = DEFAULT_AXES
    fixed: dict = field(default_factory=lambda: dict(FIG3_DEFAULTS))
    mode: Literal["free", "equilibrium"] = "free"
    boundary_tol: float = 1e-12
    workers: int = 1

    def __post_init__(self):
        names = [a.param for a in self.axes]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate sweep axes: {names}")
        unknown = set(self.fixed) - set(PARAMETERS)
        if unknown:
            raise SpecError(f"unknown fixed parameters: {sorted(unknown)}")
        if self.mode == "equilibrium" and {"p0_hot", "p0_cold"} & set(names):
            raise SpecError("occupations cannot be swept in equilibrium mode")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)


@dataclass
class SweepGrid:
    axes: tuple[Axis, ...]
    fixed: dict
    values: dict[str, np.ndarray]
    status: np.ndarray
    annotations: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.status.shape

    def coordinates(self, index: tuple[int, ...]) -> dict[str, float]:
        return {a.param: float(a.values()[i]) for a, i in zip(self.axes, index)}

    def rows(self):
        """Yield ``(coordinates, {quantity: value}, status)`` in row-major order."""
        axis_values = [a.values() for a in self.axes]
        for index in np.ndindex(*self.shape):
            coords = {a.param: float(v[i]) for a, v, i in zip(self.axes, axis_values, index)}
            yield coords, {k: v[index] for k, v in self.values.items()}, str(self.status[index])


@dataclass(frozen=True)
class CellResult:
    status: str
    net_work: float = math.nan
    heat_in: float = math.nan
    heat_out: float = math.nan
    efficiency: float = math.nan
    work_diff: float = math.nan


def build_point(params: dict, mode: str = "free"):
    """Spec and endpoints for one flat parameter map."""
    p = {**FIG3_DEFAULTS, **params}
    spec = make_spec_from_broadenings(
        p["gap_h"], p["delta_h"], p["gap_l"], p["delta_l"], p["rho_h"],
        p["t_hot"], p["t_cold"], p["e0_h"], p["e0_l"],
    )
    if mode == "equilibrium":
        ends = equilibrium_endpoints(spec)
    else:
        ends = PopulationEndpoints(p["p0_hot"], p["p0_cold"], "free")
    return spec, ends


def evaluate_cell(params: dict, mode: str = "free") -> CellResult:
    try:
        spec, ends = build_point(params, mode)
        w = cycle.net_work(spec, ends)
        q_in, q_out = cycle.heat_aggregates(spec, ends)
        wd = cycle.work_difference(spec, ends)
    except (SpecError, ValueError, ArithmeticError):
        return CellResult(STATUS_INVALID)
    if not all(math.isfinite(v) for v in (w, q_in, q_out, wd)):
        return CellResult(STATUS_INVALID)
    try:
        eta = cycle.efficiency(spec, ends)
    except cycle.DegenerateCycleError:
        eta = math.nan
    status = STATUS_OK
    if not (q_in > 0 and math.isfinite(eta)):
        eta = math.nan
        status = STATUS_NO_EFFICIENCY
    return CellResult(status, w, q_in, q_out, eta, wd)


def _cell_params(config: GridConfig, index: tuple[int, ...], axis_values) -> dict:
    params = dict(config.fixed)
    for a, v, i in zip(config.axes, axis_values, index):
        params[a.param] = float(v[i])
    return params


def _evaluate_chunk(args):
    config, indices = args
    axis_values = [a.values() for a in config.axes]
    return [evaluate_cell(_cell_params(config, idx, axis_values), config.mode) for idx in indices]


def evaluate_grid(config: GridConfig, order: list[tuple[int, ...]] | None = None) -> SweepGrid:
    """Evaluate every cell of ``config``.

    ``order`` permutes the evaluation sequence (cells are always stored by
    index); ``config.workers > 1`` spreads chunks over worker processes.
    """
    shape = config.shape
    indices = list(order) if order is not None else list(np.ndindex(*shape))
    if config.workers > 1 and len(indices) > 1:
        n = config.workers * 4
        chunks = [indices[k::n] for k in range(n)]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_evaluate_chunk, [(config, c) for c in chunks]))
        results = {idx: r for chunk, part in zip(chunks, parts) for idx, r in zip(chunk, part)}
    else:
        results = dict(zip(indices, _evaluate_chunk((config, indices))))

    values = {q: np.full(shape, np.nan) for q in QUANTITIES}
    status = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        r = results[idx]
        status[idx] = r.status
        for q in QUANTITIES:
            values[q][idx] = getattr(r, q)
    return SweepGrid(tuple(config.axes), dict(config.fixed), values, status)


# --- the work-difference surface ----------------------------------------------


def _work_diff(delta_h, delta_l, p0_cold, p0_hot, t_hot, t_cold):
    spec, ends = build_point(
        {"delta_h": delta_h, "delta_l": delta_l, "p0_cold": p0_cold, "p0_hot": p0_hot,
         "t_hot": t_hot, "t_cold": t_cold}
    )
    return cycle.work_difference(spec, ends)


def slope_signs(delta_h, delta_l_values, p0_cold, p0_hot, t_hot, t_cold, step=1e-6) -> np.ndarray:
    """Central-difference slopes of the work difference in ``delta_l`` at
    fixed ``delta_h``."""
    out = []
    for dl in delta_l_values:
        h = step * max(1.0, dl)
        lo = max(dl - h, 0.5 * dl)
        hi = dl + h
        up = _work_diff(delta_h, hi, p0_cold, p0_hot, t_hot, t_cold)
        down = _work_diff(delta_h, lo, p0_cold, p0_hot, t_hot, t_cold)
        out.append((up - down) / (hi - lo))
    return np.array(out)


def fig3_surface(
    p0_cold: float = 0.5,
    p0_hot: float = 0.3,
    t_hot: float = 5.0,
    t_cold: float = 1.0,
    axis_h: Axis = DEFAULT_AXES[0],
    axis_l: Axis = DEFAULT_AXES[1],
    slope_probes: tuple[float, ...] = (0.1, 4.5),
    workers: int = 1,
) -> SweepGrid:
    """Work difference ``net_work - two-level work`` over (``delta_h``, ``delta_l``).

    The gaps are held equal, so the two-level term vanishes and each cell is
    ``(delta_h - delta_l) * ((p0_cold - p0_hot) + f)``; diagonal cells are
    exactly zero.  Measured slope signs and the sign pattern next to the
    diagonal are attached as annotations.
    """
    if axis_h.param != "delta_h" or axis_l.param != "delta_l":
        raise SpecError("fig3 axes must be delta_h and delta_l")
    if axis_h.count < 2 or axis_l.count < 2:
        raise SpecError("fig3 axes need at least 2 points each")
    fixed = {**FIG3_DEFAULTS, "p0_cold": p0_cold, "p0_hot": p0_hot, "t_hot": t_hot, "t_cold": t_cold}
    fixed.pop("delta_h")
    fixed.pop("delta_l")
    grid = evaluate_grid(GridConfig((axis_h, axis_l), fixed, "free", workers=workers))
    grid.values = {"work_diff": grid.values["work_diff"]}
    grid.annotations = _fig3_annotations(grid, fixed, slope_probes)
    return grid


def _fig3_annotations(grid: SweepGrid, fixed: dict, probes) -> list[str]:
    notes = []
    dh = grid.axes[0].values()
    dl = grid.axes[1].values()
    wd = grid.values["work_diff"]
    args = (fixed["p0_cold"], fixed["p0_hot"], fixed["t_hot"], fixed["t_cold"])

    diag = [wd[i, j] for i in range(len(dh)) for j in range(len(dl)) if dh[i] == dl[j]]
    notes.append(
        f"diagonal cells: {len(diag)}, exactly zero: {sum(1 for v in diag if v == 0.0)}"
    )
    for probe in probes:
        s = slope_signs(probe, dl, *args)
        neg, pos = int((s < 0).sum()), int((s > 0).sum())
        if neg == len(s):
            trend = "decreasing"
        elif pos == len(s):
            trend = "increasing"
        else:
            first = "increasing" if s[0] > 0 else "decreasing"
            trend = f"mixed, {first} at small delta_l"
        notes.append(
            f"slope d(work_diff)/d(delta_l) at delta_h={probe:g}: negative at {neg}/{len(s)}, "
            f"positive at {pos}/{len(s)} sampled delta_l columns ({trend}); "
            f"range [{s.min():.6g}, {s.max():.6g}]"
        )

    above = below = above_pos = below_pos = 0
    for i in range(len(dh)):
        for j in range(len(dl)):
            if j == i - 1 and dh[i] > dl[j]:
                above += 1
                above_pos += wd[i, j] > 0
            elif j == i + 1 and dh[i] < dl[j]:
                below += 1
                below_pos += wd[i, j] > 0
    if above or below:
        notes.append(
            "next to the diagonal: positive in "
            f"{above_pos}/{above} cells with delta_h > delta_l and {below_pos}/{below} cells with delta_h < delta_l"
        )
    ok = grid.status == STATUS_OK
    notes.append(
        f"sign pattern: positive {int((wd[ok] > 0).sum())}, negative {int((wd[ok] < 0).sum())}, "
        f"zero {int((wd[ok] == 0).sum())} of {int(ok.sum())} evaluated cells"
    )
    return notes


# --- regions and optima -------------------------------------------------------


def positive_work_region(config: GridConfig) -> SweepGrid:
    """Mask of cells with net work above ``boundary_tol``; cells with
    ``|net_work| <= boundary_tol`` are flagged separately as boundary."""
    grid = evaluate_grid(config)
    w = grid.values["net_work"]
    valid = grid.status != STATUS_INVALID
    with np.errstate(invalid="ignore"):
        boundary = valid & (np.abs(w) <= config.boundary_tol)
        positive = valid & (w > config.boundary_tol)
    grid.values["positive"] = positive
    grid.values["boundary"] = boundary
    grid.annotations.append(
        f"positive cells: {int(positive.sum())}, boundary cells: {int(boundary.sum())}, "
        f"invalid cells: {int((~valid).sum())}"
    )
    return grid


def best_point(
    config: GridConfig | SweepGrid,
    objective: Literal["net_work", "efficiency"] = "net_work",
) -> tuple[tuple[int, ...], dict[str, float], float]:
    """Argmax of ``objective`` over the grid; ties go to the lowest row-major
    index.  Efficiency skips cells where it is undefined."""
    if objective not in ("net_work", "efficiency"):
        raise ValueError(f"unknown objective {objective!r}")
    grid = config if isinstance(config, SweepGrid) else evaluate_grid(config)
    allowed = {STATUS_OK} if objective == "efficiency" else {STATUS_OK, STATUS_NO_EFFICIENCY}
    feasible = np.vectorize(lambda s: s in allowed, otypes=[bool])(grid.status)
    if not feasible.any():
        raise NoFeasibleCellError(f"no feasible cell for objective {objective!r}")
    scores = np.where(feasible, grid.values[objective], -np.inf).ravel()
    flat = int(np.argmax(scores))
    index = tuple(int(i) for i in np.unravel_index(flat, grid.shape))
    return index, grid.coordinates(index), float(scores[flat])


def frozen_population_sign_table(delta_h_values, delta_l_values, ratios, p=0.5, t_cold=1.0):
    """Sign of the no-transfer net work against the predicted sign
    ``sign(delta_h - delta_l) * sign(delta_l/T_l - delta_h/T_h)`` on a grid.

    Returns ``(actual, predicted)`` integer arrays of shape
    ``(len(delta_h), len(delta_l), len(ratios))``.
    """
    shape = (len(delta_h_values), len(delta_l_values), len(ratios))
    actual = np.zeros(shape, dtype=int)
    predicted = np.zeros(shape, dtype=int)
    for (i, dh), (j, dl), (k, r) in product(
        enumerate(delta_h_values), enumerate(delta_l_values), enumerate(ratios)
    ):
        t_hot = r * t_cold
        spec = make_spec_from_broadenings(1.0, dh, 1.0, dl, 1.0, t_hot, t_cold)
        w = cycle.net_work(spec, PopulationEndpoints(p, p))
        actual[i, j, k] = int(np.sign(w))
        predicted[i, j, k] = int(np.sign(dh - dl) * np.sign(dl / t_cold - dh / t_hot))
    return actual, predicted
