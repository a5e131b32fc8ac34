"""CSV and JSON serializers.

Column orders and key names are fixed so that outputs are byte-stable:

* work-difference grid: ``delta_h,delta_l,work_diff,status``
* general sweep: ``<axis params...>,net_work,heat_in,heat_out,efficiency,work_diff,status``
* cycle: ``name,value`` rows (see :data:`CYCLE_ROWS`)

Floats are written with 17 significant digits and a ``.`` decimal point;
undefined values are written as ``nan`` (CSV) or ``null`` (JSON).  Grid
annotations follow the data rows as ``# ``-prefixed comment lines.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .cycle import CycleResult
from .sweep import SweepGrid

SWEEP_QUANTITIES = ("net_work", "heat_in", "heat_out", "efficiency", "work_diff")

# quantities that carry energy units and are rescaled by kt_l on output
ENERGY_COLUMNS = {
    "net_work", "heat_in", "heat_out", "work_diff",
    "gap_h", "delta_h", "gap_l", "delta_l", "t_hot", "t_cold", "e0_h", "e0_l",
    "heat_in_total", "heat_out_total",
}
INVERSE_ENERGY_COLUMNS = {"rho_h"}


def fmt(x) -> str:
    if isinstance(x, (bool,)) or x is None:
        return str(x).lower() if x is not None else "nan"
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _scale(name: str, value, kt_l: float):
    if value is None or kt_l == 1.0:
        return value
    if name in ENERGY_COLUMNS:
        return value * kt_l
    if name in INVERSE_ENERGY_COLUMNS:
        return value / kt_l
    return value


def _json_number(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def _csv_text(header, rows, annotations=()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    for note in annotations:
        buf.write(f"# {note}\n")
    return buf.getvalue()


def grid_columns(grid: SweepGrid) -> list[str]:
    names = [a.param for a in grid.axes]
    return names + [q for q in SWEEP_QUANTITIES if q in grid.values] + ["status"]


def grid_to_csv(grid: SweepGrid, kt_l: float = 1.0) -> str:
    columns = grid_columns(grid)
    rows = []
    for coords, values, status in grid.rows():
        row = [fmt(_scale(k, v, kt_l)) for k, v in coords.items()]
        row += [fmt(_scale(q, values[q], kt_l)) for q in SWEEP_QUANTITIES if q in values]
        rows.append(row + [status])
    return _csv_text(columns, rows, grid.annotations)


def grid_to_json(grid: SweepGrid, kt_l: float = 1.0) -> str:
    rows = []
    for coords, values, status in grid.rows():
        row = [_json_number(_scale(k, v, kt_l)) for k, v in coords.items()]
        row += [_json_number(_scale(q, values[q], kt_l)) for q in SWEEP_QUANTITIES if q in values]
        rows.append(row + [status])
    doc = {
        "axes": [{"param": a.param, "min": a.min, "max": a.max, "count": a.count} for a in grid.axes],
        "fixed": {k: _json_number(_scale(k, v, kt_l)) for k, v in sorted(grid.fixed.items())},
        "columns": grid_columns(grid),
        "rows": rows,
        "annotations": list(grid.annotations),
    }
    return json.dumps(doc, indent=1) + "\n"


CYCLE_ROWS = (
    "net_work", "heat_in_total", "heat_out_total", "efficiency", "engine_f",
    "carnot_efficiency", "p0_hot", "p0_cold",
)


def cycle_records(result: CycleResult, kt_l: float = 1.0) -> list[tuple[str, float | None]]:
    out = []
    for name in CYCLE_ROWS:
        if name in ("p0_hot", "p0_cold"):
            value = getattr(result.endpoints, name)
        else:
            value = getattr(result, name)
        out.append((name, _scale(name, value, kt_l)))
    for b in result.ledgers:
        for field in ("delta_u", "work_out", "heat_in"):
            value = getattr(b, field)
            out.append((f"branch_{b.branch_id}.{field}", value * kt_l))
    return out


def cycle_to_csv(result: CycleResult, kt_l: float = 1.0) -> str:
    rows = [[name, fmt(value)] for name, value in cycle_records(result, kt_l)]
    return _csv_text(["name", "value"], rows, result.diagnostics)


def cycle_to_json(result: CycleResult, kt_l: float = 1.0) -> str:
    records = dict(cycle_records(result, kt_l))
    doc = {
        "mode": result.endpoints.mode,
        **{k: _json_number(records[k]) for k in CYCLE_ROWS},
        "branches": [
            {
                "branch": b.branch_id,
                "delta_u": b.delta_u * kt_l,
                "work_out": b.work_out * kt_l,
                "heat_in": b.heat_in * kt_l,
            }
            for b in result.ledgers
        ],
        "diagnostics": list(result.diagnostics),
    }
    return json.dumps(doc, indent=1) + "\n"


def cycle_table(result: CycleResult, kt_l: float = 1.0) -> str:
    """Human-readable summary printed by the ``cycle`` command."""
    eta = result.efficiency
    lines = [
        f"mode            {result.endpoints.mode}",
        f"p0_hot          {result.endpoints.p0_hot:.10g}",
        f"p0_cold         {result.endpoints.p0_cold:.10g}",
        f"net_work        {result.net_work * kt_l:.10g}",
        f"heat_in_total   {result.heat_in_total * kt_l:.10g}",
        f"heat_out_total  {result.heat_out_total * kt_l:.10g}",
        f"eta             {'undefined' if eta is None else format(eta, '.10g')}",
        f"carnot bound    {result.carnot_efficiency:.10g}",
        "",
        f"{'branch':>6}  {'delta_u':>16}  {'work_out':>16}  {'heat_in':>16}",
    ]
    for b in result.ledgers:
        lines.append(
            f"{b.branch_id:>6}  {b.delta_u * kt_l:>16.10g}  {b.work_out * kt_l:>16.10g}  {b.heat_in * kt_l:>16.10g}"
        )
    total_q = math.fsum(b.heat_in for b in result.ledgers) * kt_l
    total_w = math.fsum(b.work_out for b in result.ledgers) * kt_l
    lines.append(f"{'sum':>6}  {'':>16}  {total_w:>16.10g}  {total_q:>16.10g}")
    for d in result.diagnostics:
        lines.append(f"# {d}")
    return "\n".join(lines) + "\n"


def report_to_json(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
