"""Command-line interface.

    mzm-braiding simulate <scenario> [--config FILE] [--set k=v ...]
                                     [--seed U64] [--out DIR] [--series]
    mzm-braiding scan     <scenario> ...   (alias; requires a sweep)
    mzm-braiding calibrate [--config FILE] [--set k=v ...]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, parse_config_file, parse_overrides
from .evolution import NumericalFailure
from .experiments import (
    SCENARIOS,
    calibration_factor,
    resolve_config,
    run_scenario,
    write_results,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(parser: argparse.ArgumentParser, with_scenario: bool) -> None:
    if with_scenario:
        parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", metavar="FILE", default=None,
                        help="key = value configuration file")
    parser.add_argument("--set", metavar="K=V", action="append", default=[],
                        dest="overrides", help="override one config key")
    parser.add_argument("--seed", type=int, default=None,
                        help="ensemble seed (overrides ensemble.seed)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzm-braiding",
        description="Majorana braiding simulation: scenarios, sweeps, calibration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run one scenario"),
        ("scan", "run a sweep scenario (alias of simulate, sweep required)"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p, with_scenario=True)
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (default: $MZM_BRAIDING_OUT or ./results/<scenario>)")
        p.add_argument("--series", action="store_true",
                       help="also write fidelity time-series files")
    p = sub.add_parser("calibrate", help="print the pulse-area calibration factor")
    _add_common(p, with_scenario=False)
    return parser


def _resolve(args, scenario: str) -> dict:
    file_cfg = parse_config_file(args.config) if args.config else None
    overrides = parse_overrides(args.overrides)
    return resolve_config(scenario, file_cfg, overrides, seed=args.seed)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "calibrate":
            cfg = _resolve(args, "custom")
            print(f"calibration_factor = {calibration_factor(cfg)!r}")
            return EXIT_OK
        cfg = _resolve(args, args.scenario)
        if args.command == "scan" and not cfg["sweep.param"]:
            raise ConfigError(
                f"scenario {args.scenario!r} has no sweep; set sweep.param or use simulate"
            )
        out_dir = args.out or os.environ.get("MZM_BRAIDING_OUT") or os.path.join(
            "results", args.scenario
        )
        rows, series_map, manifest = run_scenario(
            args.scenario, cfg, want_series=args.series
        )
        paths = write_results(rows, series_map, manifest, out_dir)
        for path in paths:
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
