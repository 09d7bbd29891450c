"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage or parse error,
3 oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
from pathlib import Path

from . import __version__
from .model import TABLE1, AssumptionReport, ConfigError, MarketParams, ModelError, load_config, validate
from .oracle import run_oracle
from .phases import InfeasibleError
from .strategy import StrategyClass, profit_share, select_strategy
from .sweep import AxisSpec, m_f_cap, sweep_grid
from .trajectory import COLUMNS, render

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_ORACLE = 3


class UsageError(Exception):
    pass


def fmt(value) -> str:
    """Text form used in every CSV cell; floats keep 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) or hasattr(value, "dtype"):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_manifest(
    out_dir: Path,
    stem: str,
    params: MarketParams,
    argv: list[str],
    outputs: list[Path],
    seed: int | None = None,
) -> Path:
    manifest = {
        "command": argv,
        "params": params.as_dict(),
        "outputs": [str(p) for p in outputs],
        "seed": seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    path = out_dir / f"{stem}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def _load(config: str | None) -> MarketParams:
    return TABLE1 if config is None else load_config(config)


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def format_report(report: AssumptionReport) -> str:
    lines = [f"{'condition':<22} {'status':<8} {'slack':>14}  test"]
    for c in report.conditions():
        status = "pending" if c.holds is None else ("ok" if c.holds else "FAIL")
        slack = "" if c.holds is None else f"{c.slack:.6g}"
        lines.append(f"{c.name:<22} {status:<8} {slack:>14}  {c.description}")
    return "\n".join(lines)


def cmd_validate(config_path: str | None) -> int:
    params = _load(config_path)
    try:
        report = validate(params)
    except ModelError as exc:
        print(f"invalid parameters: {exc}")
        return EXIT_INVALID
    share = profit_share(params)
    if share.feasible:
        report = validate(params, share.depletion_cartel)
    print(format_report(report))
    return EXIT_OK if report.all_hold else EXIT_INVALID


def cmd_solve(config_path: str | None, out_dir: str, argv: list[str]) -> int:
    params = _load(config_path)
    try:
        validate(params)
    except ModelError as exc:
        print(f"invalid parameters: {exc}")
        return EXIT_INVALID
    cmp = select_strategy(params, diagnostics=True)
    out = _out_dir(out_dir)
    path = out / "comparison.csv"
    rows = []
    for o in cmp.outcomes:
        rows.append(
            (
                o.strategy.value,
                o.feasible,
                o.profit,
                o.depletion_cartel,
                o.depletion_fringe,
                o.strategy in cmp.tied,
                o.reason,
            )
        )
    header = ("strategy", "feasible", "profit", "depletion_cartel", "depletion_fringe", "best", "reason")
    write_csv(path, header, rows)
    write_manifest(out, "comparison", params, argv, [path])
    if cmp.best is None:
        print("best: none (no feasible strategy)")
    else:
        label = " | ".join(s.value for s in cmp.tied)
        print(f"best: {label}" + (" (tie)" if cmp.is_tie else ""))
    for key, value in cmp.margins.items():
        print(f"margin {key}: {fmt(value)}")
    return EXIT_OK


def cmd_traj(
    config_path: str | None, strategy_class: str, n_points: int, out_dir: str, argv: list[str]
) -> int:
    if n_points < 2:
        raise UsageError("--n-points must be at least 2")
    params = _load(config_path)
    try:
        validate(params)
    except ModelError as exc:
        print(f"invalid parameters: {exc}")
        return EXIT_INVALID
    outcome = select_strategy(params).outcome(strategy_class.capitalize())
    try:
        traj = render(outcome, params, n_points)
    except InfeasibleError as exc:
        print(str(exc))
        return EXIT_INVALID
    out = _out_dir(out_dir)
    path = out / "trajectory.csv"
    write_csv(path, COLUMNS, traj.rows())
    write_manifest(out, "trajectory", params, argv, [path])
    for jump in traj.jumps:
        print(f"price jump at t={fmt(jump.time)}: {fmt(jump.p_left)} -> {fmt(jump.p_right)}")
    return EXIT_OK


def cmd_sweep(config_path: str | None, axes: list[str], out_dir: str, argv: list[str]) -> int:
    try:
        specs = [AxisSpec.parse(a) for a in axes]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise UsageError(f"axis names must be distinct, got {names}")
    params = _load(config_path)
    for s in specs:
        if s.name == "m_f" and max(s.lo, s.hi) >= m_f_cap(params):
            raise UsageError(f"m_f must stay below (alpha - b)/beta = {m_f_cap(params):.6g}")
    grid = sweep_grid(specs, params)
    out = _out_dir(out_dir)
    path = out / "grid.csv"
    write_csv(path, grid.columns, grid.rows())
    write_manifest(out, "grid", params, argv, [path])
    n_valid = sum(c.valid for c in grid.cells)
    print(f"{len(grid.cells)} cells, {n_valid} valid")
    return EXIT_OK


def cmd_oracle(config_path: str | None, seed: int, out_dir: str, argv: list[str]) -> int:
    params = _load(config_path)
    try:
        validate(params)
    except ModelError as exc:
        print(f"invalid parameters: {exc}")
        return EXIT_INVALID
    reports = run_oracle(params, seed)
    out = _out_dir(out_dir)
    path = out / "oracle_report.csv"
    header = ("check", "closed_form", "oracle", "gap", "tolerance", "passed", "detail")
    rows = [
        (r.check, r.closed_form, r.oracle, r.gap, r.tolerance, "skip" if r.passed is None else r.passed, r.detail)
        for r in reports
    ]
    write_csv(path, header, rows)
    write_manifest(out, "oracle_report", params, argv, [path], seed=seed)
    failed = [r.check for r in reports if r.failed]
    for r in reports:
        verdict = "skip" if r.passed is None else ("pass" if r.passed else "FAIL")
        print(f"{verdict:<5} {r.check}  gap={fmt(r.gap)}  tol={fmt(r.tolerance)}")
    return EXIT_ORACLE if failed else EXIT_OK


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value parameter file (defaults to the benchmark)")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")

    parser = argparse.ArgumentParser(
        prog="cartel-fringe",
        description="Cartel-versus-fringe resource market solver.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check standing assumptions")
    sub.add_parser("solve", parents=[common], help="compare the three strategy classes")

    traj = sub.add_parser("traj", parents=[common], help="sample one equilibrium path")
    traj.add_argument(
        "--strategy",
        required=True,
        type=str.lower,
        choices=[s.value.lower() for s in StrategyClass],
    )
    traj.add_argument("--n-points", type=int, default=200, help="samples per phase (>= 2)")

    sweep = sub.add_parser("sweep", parents=[common], help="grid over one or more parameters")
    sweep.add_argument("--axis", action="append", required=True, metavar="NAME:LO:HI:N")

    oracle = sub.add_parser("oracle", parents=[common], help="run numerical verification")
    oracle.add_argument("--seed", type=_seed, required=True, metavar="U64")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "validate":
            return cmd_validate(args.config)
        if args.command == "solve":
            return cmd_solve(args.config, args.out, argv)
        if args.command == "traj":
            return cmd_traj(args.config, args.strategy, args.n_points, args.out, argv)
        if args.command == "sweep":
            return cmd_sweep(args.config, args.axis, args.out, argv)
        return cmd_oracle(args.config, args.seed, args.out, argv)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
