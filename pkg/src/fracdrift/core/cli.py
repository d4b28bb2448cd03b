"""Command-line entry point ``fracdrift``."""

import argparse
import logging
import os
import sys
from typing import Optional

from dotenv import load_dotenv

from .commands import (
    ExitCode,
    cmd_analyze,
    cmd_check_constants,
    cmd_evolve,
    cmd_solve_stationary,
    cmd_toy,
)
from .run_config import ConfigError, load_run_config

COMMANDS = {
    "solve-stationary": cmd_solve_stationary,
    "analyze-regularity": cmd_analyze,
    "toy-model": cmd_toy,
    "check-constants": cmd_check_constants,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdrift",
        description="Spectral solvers and diagnostics for fractional drift-diffusion equations",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve-stationary", "Picard solve of the stationary equation"),
        ("evolve", "Exponential-Euler integration of the evolution problem"),
        ("analyze-regularity", "Measure the regularity gain of a synthetic source"),
        ("toy-model", "Regularity gain of the toy equation"),
        ("check-constants", "Print the smallness-gate record"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="Path to the key=value run configuration")
        sub.add_argument("--output", default=None, help="Output directory (overrides output_dir)")
        if name == "evolve":
            sub.add_argument(
                "--check-stationary",
                default=None,
                metavar="PATH",
                help="Evolve this FRQS dump under the configured source and report its drift",
            )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    load_dotenv()
    logging.basicConfig(
        level=os.getenv("FRACDRIFT_LOG_LEVEL", "WARNING").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.CONFIG_ERROR)
    if args.command == "evolve":
        return int(cmd_evolve(cfg, args.output, args.check_stationary))
    return int(COMMANDS[args.command](cfg, args.output))


if __name__ == "__main__":
    sys.exit(main())
