"""Subcommand orchestration: build inputs from a RunConfig, run a pipeline, persist artifacts."""

import logging
import math
import os
import sys
from enum import IntEnum
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..models.fields import Grid, RealField
from ..models.reports import EvolutionReport, RunMetadata, SourceReport
from ..services import serializers
from ..services.evolution_solver import BlowUpError, evolve, stationarity_check
from ..services.function_spaces import InsufficientResolutionError, decay_exponent, shell_energies
from ..services.operators import frac_laplacian
from ..services.regularity_lab import UnsupportedRangeError, measure_gain, synthesize_source
from ..services.spectral_core import FracDriftError, forward_transform
from ..services.stationary_solver import (
    DivergenceError,
    GateRefusedError,
    NonConvergenceError,
    picard_solve,
    smallness_gate,
)
from ..services.toy_model import toy_gain_experiment
from .run_config import ConfigError, RunConfig

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "fracdrift_output"


class ExitCode(IntEnum):
    OK = 0
    CONFIG_ERROR = 1
    NON_CONVERGENCE = 2
    DIVERGENCE = 3
    BLOW_UP = 4
    NOT_STATIONARY = 5
    ANALYSIS_FAILURE = 6


def resolve_output_dir(cfg: RunConfig, override: Optional[str] = None) -> Path:
    """--output, then ``output_dir`` from the config, then FRACDRIFT_OUTPUT_DIR."""
    directory = override or cfg.output_dir or os.getenv("FRACDRIFT_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _metadata(cfg: RunConfig) -> RunMetadata:
    return RunMetadata(package_version=__version__, config_digest=cfg.digest())


def _lowest_mode(grid: Grid) -> RealField:
    x1 = grid.coordinates()[0]
    return RealField(grid=grid, samples=np.cos(2 * math.pi * x1 / grid.side))


def build_field(kind: str, cfg: RunConfig, elliptic: bool = True) -> RealField:
    """
    Materialize a source or initial datum.

    ``synthetic`` is a random-phase power-law source, ``mode`` the lowest
    Fourier mode along the first axis (lifted by (−Δ)^{α/2} when
    ``elliptic``), ``zero`` the zero field.

    Raises:
        ConfigError: If a synthetic field is requested without ``gamma``
    """
    grid = cfg.grid()
    if kind == "zero":
        return RealField.zeros(grid)
    if kind == "mode":
        mode = _lowest_mode(grid)
        field = frac_laplacian(mode, cfg.alpha) if elliptic else mode
        return field.scaled(cfg.amplitude)
    if cfg.gamma is None:
        raise ConfigError("gamma", "synthetic sources need gamma")
    return synthesize_source(cfg.gamma, cfg.amplitude, cfg.seed, grid)


def _fail(code: ExitCode, error: Exception) -> ExitCode:
    print(f"error: {error}", file=sys.stderr)
    return code


def cmd_solve_stationary(cfg: RunConfig, output: Optional[str] = None) -> ExitCode:
    """Picard solve; writes u.frqs, solve_report.json and iterations.csv."""
    out = resolve_output_dir(cfg, output)
    try:
        f = build_field(cfg.source, cfg)
        report = picard_solve(f, cfg.drift_operator(), cfg.solver_config())
    except GateRefusedError as exc:
        print(exc.gate.model_dump_json(indent=2, by_alias=True), file=sys.stderr)
        return _fail(ExitCode.CONFIG_ERROR, exc)
    except (DivergenceError, NonConvergenceError) as exc:
        serializers.write_report(out / "solve_report.json", exc.report, _metadata(cfg), cfg.canonical())
        serializers.write_csv(out / "iterations.csv", serializers.iterations_frame(exc.report))
        code = ExitCode.DIVERGENCE if isinstance(exc, DivergenceError) else ExitCode.NON_CONVERGENCE
        return _fail(code, exc)
    except (ConfigError, FracDriftError) as exc:
        return _fail(ExitCode.CONFIG_ERROR, exc)
    serializers.write_field(out / "u.frqs", report.u)
    serializers.write_report(out / "solve_report.json", report, _metadata(cfg), cfg.canonical())
    serializers.write_csv(out / "iterations.csv", serializers.iterations_frame(report))
    print(f"converged in {report.iterations} iterations; residual {report.residual:.3e}; output in {out}")
    return ExitCode.OK


def cmd_evolve(cfg: RunConfig, output: Optional[str] = None, check_stationary: Optional[str] = None) -> ExitCode:
    """
    Exponential-Euler run; writes trajectory/state_XXXXX.frqs, trajectory.csv and evolution_report.json.

    With ``check_stationary`` the given FRQS dump is evolved under the
    configured source instead and the relative drift is printed.
    """
    out = resolve_output_dir(cfg, output)
    try:
        g = build_field(cfg.source, cfg)
        drift = cfg.drift_operator()
        if check_stationary:
            u = serializers.read_field(check_stationary)
            value = stationarity_check(u, g, drift, cfg.alpha, cfg.T, cfg.dt)
            print(f"stationarity drift {value:.3e} (threshold {cfg.stationary_threshold:.1e})")
            return ExitCode.OK if value <= cfg.stationary_threshold else ExitCode.NOT_STATIONARY
        v0 = build_field(cfg.initial, cfg, elliptic=False)
        trajectory, diagnostics = evolve(v0, g, drift, cfg.alpha, cfg.T, cfg.dt, cfg.p, cfg.save_every)
    except BlowUpError as exc:
        summary = EvolutionReport(trajectory=exc.trajectory, blow_up_time=exc.time)
        serializers.write_trajectory(out / "trajectory", exc.trajectory)
        serializers.write_csv(out / "trajectory.csv", serializers.trajectory_frame(exc.trajectory))
        serializers.write_report(out / "evolution_report.json", summary, _metadata(cfg), cfg.canonical())
        return _fail(ExitCode.BLOW_UP, exc)
    except (ConfigError, FracDriftError) as exc:
        return _fail(ExitCode.CONFIG_ERROR, exc)
    serializers.write_trajectory(out / "trajectory", trajectory)
    serializers.write_csv(out / "trajectory.csv", serializers.trajectory_frame(trajectory))
    summary = EvolutionReport(trajectory=trajectory, diagnostics=diagnostics)
    serializers.write_report(out / "evolution_report.json", summary, _metadata(cfg), cfg.canonical())
    print(f"evolved to T={cfg.T} in {len(trajectory.steps) - 1} steps; E_T norm {diagnostics.et_norm:.6g}")
    return ExitCode.OK


def cmd_analyze(cfg: RunConfig, output: Optional[str] = None) -> ExitCode:
    """Regularity-gain pipeline; writes regularity_report.json and shells.csv."""
    out = resolve_output_dir(cfg, output)
    try:
        f = build_field("synthetic", cfg)
        if cfg.synthetic_only:
            shells = shell_energies(forward_transform(f))
            report = SourceReport(
                gamma=cfg.gamma,
                s_star_f=decay_exponent(shells),
                expected_s_star=cfg.gamma - cfg.n / 2,
                shells_f=shells.energies,
            )
            serializers.write_report(out / "regularity_report.json", report, _metadata(cfg), cfg.canonical())
            serializers.write_csv(out / "shells.csv", serializers.shells_frame(f=report.shells_f))
            print(f"s*(f) = {report.s_star_f:.4f} (expected {report.expected_s_star:.4f})")
            return ExitCode.OK
        report = measure_gain(f, cfg.drift_operator(), cfg.alpha, cfg.solver_config())
    except (InsufficientResolutionError, UnsupportedRangeError) as exc:
        return _fail(ExitCode.ANALYSIS_FAILURE, exc)
    except DivergenceError as exc:
        return _fail(ExitCode.DIVERGENCE, exc)
    except NonConvergenceError as exc:
        return _fail(ExitCode.NON_CONVERGENCE, exc)
    except (ConfigError, FracDriftError) as exc:
        return _fail(ExitCode.CONFIG_ERROR, exc)
    serializers.write_field(out / "u.frqs", report.solve.u)
    serializers.write_report(out / "regularity_report.json", report, _metadata(cfg), cfg.canonical())
    serializers.write_csv(out / "shells.csv", serializers.shells_frame(f=report.shells_f, u=report.shells_u))
    print(f"gain {report.gain:.4f} (expected {report.expected_gain:.4f}); margin {report.optimality_margin:+.4f}")
    return ExitCode.OK


def cmd_toy(cfg: RunConfig, output: Optional[str] = None) -> ExitCode:
    """Toy-model gain experiment; writes regularity_report.json and shells.csv."""
    out = resolve_output_dir(cfg, output)
    try:
        if cfg.gamma is None:
            raise ConfigError("gamma", "the toy experiment needs gamma")
        toy = cfg.toy_config()
        report = toy_gain_experiment(cfg.gamma, cfg.alpha, toy.beta, cfg.grid(), cfg.amplitude, cfg.seed, toy)
    except (InsufficientResolutionError, UnsupportedRangeError) as exc:
        return _fail(ExitCode.ANALYSIS_FAILURE, exc)
    except DivergenceError as exc:
        return _fail(ExitCode.DIVERGENCE, exc)
    except NonConvergenceError as exc:
        return _fail(ExitCode.NON_CONVERGENCE, exc)
    except (ConfigError, FracDriftError) as exc:
        return _fail(ExitCode.CONFIG_ERROR, exc)
    serializers.write_field(out / "u.frqs", report.solve.u)
    serializers.write_report(out / "regularity_report.json", report, _metadata(cfg), cfg.canonical())
    serializers.write_csv(out / "shells.csv", serializers.shells_frame(f=report.shells_f, u=report.shells_u))
    print(f"toy gain {report.gain:.4f} (expected {report.expected_gain:.4f})")
    return ExitCode.OK


def cmd_check_constants(cfg: RunConfig, output: Optional[str] = None) -> ExitCode:
    """Evaluate the smallness gate only; prints the record and writes gate.json."""
    out = resolve_output_dir(cfg, output)
    try:
        f = build_field(cfg.source, cfg)
        gate = smallness_gate(f, cfg.solver_config(), cfg.drift_operator())
    except (ConfigError, FracDriftError) as exc:
        return _fail(ExitCode.CONFIG_ERROR, exc)
    serializers.write_report(out / "gate.json", gate, _metadata(cfg), cfg.canonical())
    print(gate.model_dump_json(indent=2, by_alias=True))
    return ExitCode.OK
