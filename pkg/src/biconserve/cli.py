"""Command-line interface.

Exit codes: 0 success, 1 a verification check failed, 2 bad arguments or
input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .closure import ClosureTarget, enumerate_targets, solve_level, sweep
from .config import Tolerances, load_tolerances
from .errors import BiconserveError, NumericalError
from .io import SWEEP_COLUMNS, dumps, read_curve, report_to_json, rows_to_csv, write_curve
from .params import ModelParams
from .trace import assemble_closed, trace_level
from .verify import verify_trace

log = logging.getLogger("biconserve")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(BiconserveError):
    pass


@dataclass
class RunConfig:
    n: int | None = None
    rho: float = 1.0
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_format: str = "csv"
    output_path: Path | None = None
    points: int = 4096

    def __post_init__(self):
        if self.points < 16:
            raise UsageError(f"--points must be >= 16, got {self.points}")
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.output_format!r}")


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _table(columns, rows, fmt):
    if fmt == "json":
        return dumps([dict(zip(columns, row)) for row in rows], indent=1) + "\n"
    return rows_to_csv(columns, rows)


def cmd_enumerate(args, cfg: RunConfig) -> int:
    if args.max_r < 1:
        raise UsageError(f"--max-r must be a positive integer, got {args.max_r}")
    rows = [(t.l, t.r, t.angle) for t in enumerate_targets(args.max_r)]
    _emit(_table(("l", "r", "angle"), rows, cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if not 0 < args.d_min <= args.d_max:
        raise UsageError("need 0 < --d-min <= --d-max")
    space = np.geomspace if args.log else np.linspace
    d_values = space(args.d_min, args.d_max, args.steps) if args.steps > 1 else [args.d_min]
    rows = [row.as_tuple() for row in sweep(cfg.n, d_values, cfg.rho, cfg.tolerances, args.workers)]
    _emit(_table(SWEEP_COLUMNS, rows, cfg.output_format), cfg.output_path)
    return EXIT_OK


def _target(args):
    if args.l is None and args.r is None:
        return None
    if args.l is None or args.r is None:
        raise UsageError("--l and --r must be given together")
    return ClosureTarget(args.l, args.r)


def cmd_solve(args, cfg: RunConfig) -> int:
    target = _target(args)
    columns = ("n", "rho", "l", "r", "d", "d_star", "I", "target_angle", "period")
    if target is None:
        if args.d is None:
            raise UsageError("give --l and --r, or an explicit --d")
        row = sweep(cfg.n, [args.d], cfg.rho, cfg.tolerances)[0]
        params = ModelParams(cfg.n, args.d, cfg.rho)
        values = (cfg.n, cfg.rho, None, None, args.d, params.d_star, row.i_value, None, row.period)
    else:
        sol = solve_level(target, cfg.n, cfg.rho, cfg.tolerances)
        values = (cfg.n, cfg.rho, target.l, target.r, sol.d_solved, sol.params.d_star,
                  sol.i_value, target.angle, sol.period)
    _emit(_table(columns, [values], cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_trace(args, cfg: RunConfig) -> int:
    if cfg.output_path is None:
        raise UsageError("trace requires --out")
    target = _target(args)
    if target is not None:
        sol = solve_level(target, cfg.n, cfg.rho, cfg.tolerances)
        trace = assemble_closed(sol, cfg.tolerances, cfg.points)
    elif args.d is not None:
        trace = trace_level(ModelParams(cfg.n, args.d, cfg.rho), cfg.tolerances, cfg.points)
    else:
        raise UsageError("give --l and --r, or an explicit --d")
    write_curve(trace, cfg.output_path)
    log.info("wrote %d samples to %s", len(trace), cfg.output_path)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    trace = read_curve(args.input)
    if cfg.n is not None and cfg.n != trace.params.n:
        raise UsageError(f"--n {cfg.n} does not match the curve file (n = {trace.params.n})")
    report = verify_trace(trace, cfg.tolerances)
    _emit(report_to_json(report), cfg.output_path)
    for name, ok in report.passed.items():
        if not ok:
            log.warning("check failed: %s", name)
    return EXIT_OK if report.all_passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biconserve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="tolerance file (key=value lines); overrides $BICONSERVE_CONFIG")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_n=True):
        p.add_argument("--n", type=int, required=need_n, help="ambient dimension (>= 3)")
        p.add_argument("--rho", type=float, default=1.0, help="sectional curvature (default 1)")
        p.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=Path, help="output path (default stdout)")

    p = sub.add_parser("enumerate", help="list admissible (l, r) closure pairs")
    p.add_argument("--max-r", type=int, required=True)
    p.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sweep", help="tabulate I(d) and the curvature period")
    common(p)
    p.add_argument("--d-min", type=float, required=True)
    p.add_argument("--d-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--log", action="store_true", help="log-spaced levels")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    for name, func, helptext in (("solve", cmd_solve, "solve I(d) = 2 pi l / r"),
                                 ("trace", cmd_trace, "write a traced curve as JSON")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--l", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--d", type=float, help="explicit level instead of (l, r)")
        p.add_argument("--points", type=int, default=4096)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="certify a curve JSON file and write a report")
    common(p, need_n=False)
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig(
            n=getattr(args, "n", None),
            rho=getattr(args, "rho", 1.0),
            tolerances=load_tolerances(args.config),
            output_format=args.output_format,
            output_path=args.out,
            points=getattr(args, "points", 4096),
        )
        return args.func(args, cfg)
    except NumericalError as exc:
        print(f"biconserve: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (BiconserveError, ValueError, OSError) as exc:
        print(f"biconserve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
