"""
Command-line layer: run configuration, subcommand orchestration and the ``fracdrift`` entry point.

Example:
    >>> from fracdrift.core import parse_run_config, cmd_solve_stationary
    >>> cfg = parse_run_config("n = 2\nN = 64\nalpha = 1.5\nsource = zero\n")
    >>> int(cmd_solve_stationary(cfg, "out"))
    0
"""

from .cli import main
from .commands import (
    ExitCode,
    cmd_analyze,
    cmd_check_constants,
    cmd_evolve,
    cmd_solve_stationary,
    cmd_toy,
)
from .run_config import ConfigError, RunConfig, load_run_config, parse_run_config

__all__ = [
    "main",
    "ExitCode",
    "cmd_analyze",
    "cmd_check_constants",
    "cmd_evolve",
    "cmd_solve_stationary",
    "cmd_toy",
    "ConfigError",
    "RunConfig",
    "load_run_config",
    "parse_run_config",
]
