"""Command-line entry point.

::

    continuum-otto cycle  --config F [--out F2] [--format csv|json]
    continuum-otto sweep  --config F --out F2 [--format csv|json] [--workers N]
    continuum-otto fig3   [--config F] --out F2 [--format csv|json] [--workers N]
    continuum-otto verify [--config F] [--seed N] [--samples N] [--report F2]

Exit status: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .config import ConfigError, RunConfig, load_config
from .cycle import run_cycle
from .model import SpecError
from .sweep import NoFeasibleCellError, best_point, fig3_surface, positive_work_region

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="continuum-otto",
        description="Otto-cycle thermodynamics of a discrete level plus a flat continuum.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cycle", help="evaluate one cycle and print its ledger")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("sweep", help="evaluate the configured parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("fig3", help="work difference over (delta_h, delta_l)")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", help="run the oracle battery")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--report", default="verify_report.json")
    return parser


def _config(path: str | None) -> RunConfig:
    return load_config(path) if path else RunConfig()


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")


def cmd_cycle(args) -> int:
    config = _config(args.config)
    spec = config.spec()
    result = run_cycle(spec, config.endpoints(spec))
    sys.stdout.write(io.cycle_table(result, config.kt_l))
    if args.out:
        fmt = args.format or config.format
        text = io.cycle_to_json(result, config.kt_l) if fmt == "json" else io.cycle_to_csv(result, config.kt_l)
        _write(args.out, text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _config(args.config)
    grid = positive_work_region(config.grid_config(workers=args.workers))
    for objective in ("net_work", "efficiency"):
        try:
            index, coords, value = best_point(grid, objective)
        except NoFeasibleCellError as exc:
            grid.annotations.append(f"best {objective}: {exc}")
        else:
            where = ", ".join(f"{k}={v:.17g}" for k, v in coords.items())
            grid.annotations.append(f"best {objective}: {value:.17g} at index {list(index)} ({where})")
    for q in ("positive", "boundary"):
        grid.values.pop(q)
    fmt = args.format or config.format
    _write(args.out, io.grid_to_json(grid, config.kt_l) if fmt == "json" else io.grid_to_csv(grid, config.kt_l))
    print(f"wrote {grid.status.size} cells to {args.out}")
    return EXIT_OK


def cmd_fig3(args) -> int:
    config = _config(args.config)
    if config.mode != "free":
        raise ConfigError("mode: fig3 needs free-mode occupations")
    by_name = {a.param: a for a in config.sweep}
    kwargs = {}
    if "delta_h" in by_name and "delta_l" in by_name:
        kwargs = {"axis_h": by_name["delta_h"], "axis_l": by_name["delta_l"]}
    grid = fig3_surface(
        p0_cold=config.p0_cold, p0_hot=config.p0_hot,
        t_hot=config.t_hot, t_cold=config.t_cold, workers=args.workers, **kwargs,
    )
    fmt = args.format or config.format
    _write(args.out, io.grid_to_json(grid, config.kt_l) if fmt == "json" else io.grid_to_csv(grid, config.kt_l))
    print(f"wrote {grid.status.size} cells to {args.out}")
    for note in grid.annotations:
        print(f"# {note}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import verification_document

    if args.samples < 0:
        raise ConfigError("--samples must be >= 0")
    config = _config(args.config)
    spec = config.spec()
    doc = verification_document(
        spec, config.endpoints(spec), args.samples, args.seed, config.verification_config()
    )
    _write(args.report, io.report_to_json(doc))
    battery = doc["battery"]
    for name, c in battery["checks"].items():
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"{mark} {name}: max error {c['max_error']:.3e} (tol {c['tolerance']:.0e})")
    f = doc["limits"]["f_small_x"]
    print(f"{'PASS' if f['passed'] else 'FAIL'} f small-x limit: |f - limit| = {f['abs_error']:.3e}")
    print(f"{'PASS' if doc['point']['passed'] else 'FAIL'} configured point vs both oracles")
    if not doc["passed"]:
        print(f"verification FAILED; report: {args.report}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print(f"verification passed; report: {args.report}")
    return EXIT_OK


COMMANDS = {"cycle": cmd_cycle, "sweep": cmd_sweep, "fig3": cmd_fig3, "verify": cmd_verify}


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SpecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
