"""Command line front end.

Subcommands:

* ``run CONFIG``   - execute the configured scenario, emit the report, and
  print one PASS/FAIL line per embedded check.
* ``validate CONFIG`` - parse and validate a config without running it.
* ``list-scenarios``  - print the available scenario names.

Exit status: 0 on success, 1 on a usage or config error, 2 when the run
completed but a check failed (including a missing search witness).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import FORMATS, SCENARIO_NAMES, load_config
from .errors import ConfigError, RobustUpdateError, WitnessNotFoundError
from .report import ExperimentReport
from .scenarios import run_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse's default error() exits with status 2; route through our own
    # exception so usage problems share exit code 1 with config errors.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="robust-update",
                     description="Seeded scenario runner for robust updating "
                                 "experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a JSON config")
    run.add_argument("config", help="path to the JSON config file")
    run.add_argument("--seed", type=int, default=None,
                     help="override the master seed")
    run.add_argument("--reps", type=int, default=None,
                     help="override the replication count")
    run.add_argument("--out", default=None,
                     help="override the report destination path")
    run.add_argument("--format", choices=FORMATS, default=None,
                     help="override the report format")

    val = sub.add_parser("validate", help="check a config file and exit")
    val.add_argument("config", help="path to the JSON config file")

    sub.add_parser("list-scenarios", help="print available scenario names")
    return parser


def _emit_checks(report: ExperimentReport, stream) -> None:
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {report.scenario}.{check.name}: "
              f"observed={check.observed} required: {check.required}",
              file=stream)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "list-scenarios":
        for name in SCENARIO_NAMES:
            print(name)
        return EXIT_OK

    try:
        config = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "validate":
        print(f"ok: {config.scenario}")
        return EXIT_OK

    overrides = {}
    if args.seed is not None:
        if args.seed < 0:
            print("error: --seed must be nonnegative", file=sys.stderr)
            return EXIT_USAGE
        overrides["seed"] = args.seed
    if args.reps is not None:
        if args.reps < 1:
            print("error: --reps must be positive", file=sys.stderr)
            return EXIT_USAGE
        overrides["reps"] = args.reps
    if args.out is not None:
        overrides["out_path"] = args.out
    if args.format is not None:
        overrides["out_format"] = args.format
    if overrides:
        config = dataclasses.replace(config, **overrides)

    try:
        report = run_scenario(config)
    except WitnessNotFoundError as exc:
        print(f"FAIL {config.scenario}: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RobustUpdateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if config.out_path is not None:
        report.write(config.out_path, config.out_format)
    else:
        sys.stdout.write(report.render(config.out_format))
    _emit_checks(report, sys.stdout)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
