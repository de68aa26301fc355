"""Command-line entry point.

    drowsy-alert run --config <path> [--csv <path>] [--seed <u64>]
    drowsy-alert validate --config <path>
    drowsy-alert goldens [--dir <path>]

Exit status: 0 success, 1 validation or usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from collections.abc import Sequence

from .errors import ConfigError
from .goldens import write_goldens
from .harness import emit_csv, load_config, run
from .signal_gen import ScenarioError

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit(2), which is reserved for I/O
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a u64, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drowsy-alert", description="Drowsy-driver detection and alert simulator.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="simulate a configured scenario")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--csv", help="write the per-tick trace here (overrides output.csv)")
    p_run.add_argument("--seed", type=_seed, help="override the scenario's noise seed")

    p_val = sub.add_parser("validate", help="check a config and its scenario without running")
    p_val.add_argument("--config", required=True)

    p_gold = sub.add_parser("goldens", help="regenerate golden fixtures")
    p_gold.add_argument("--dir", default="fixtures")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "goldens":
            for path in write_goldens(args.dir):
                print(f"wrote={path}")
            return EXIT_OK

        config = load_config(args.config)
        scenario = config.load_scenario()
        if args.command == "validate":
            print(f"ok={args.config}")
            return EXIT_OK

        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        report = run(config, scenario)
        for key, value in report.summary().items():
            print(f"{key}={value}")
        csv_path = args.csv or config.csv_path
        if csv_path is not None:
            emit_csv(report, csv_path)
            print(f"csv={csv_path}")
        return EXIT_OK
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
