"""End-to-end tests of the ``fracdrift`` subcommands and their exit codes."""

import json

import numpy as np
import pandas as pd
import pytest

from fracdrift.core.cli import main
from fracdrift.core.commands import ExitCode, resolve_output_dir
from fracdrift.core.run_config import parse_run_config


def write_config(tmp_path, name: str, text: str):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SMALL_MODE = "N = 32\nalpha = 1.5\nsource = mode\namplitude = 1e-4\n"


@pytest.fixture
def mode_config(tmp_path):
    return write_config(tmp_path, "mode.cfg", SMALL_MODE)


class TestSolveStationary:
    def test_writes_artifacts(self, tmp_path, mode_config, capsys):
        out = tmp_path / "out"
        assert main(["solve-stationary", "--config", mode_config, "--output", str(out)]) == ExitCode.OK
        assert (out / "u.frqs").stat().st_size == 24 + 8 * 32 * 32
        report = json.loads((out / "solve_report.json").read_text())
        assert report["report"]["converged"] is True
        assert report["report"]["gate"]["pass"] is True
        assert list(pd.read_csv(out / "iterations.csv").columns)[0] == "iter"
        assert "converged" in capsys.readouterr().out

    def test_dumps_are_deterministic(self, tmp_path, mode_config):
        first, second = tmp_path / "a", tmp_path / "b"
        main(["solve-stationary", "--config", mode_config, "--output", str(first)])
        main(["solve-stationary", "--config", mode_config, "--output", str(second)])
        assert (first / "u.frqs").read_bytes() == (second / "u.frqs").read_bytes()
        left = json.loads((first / "solve_report.json").read_text())
        right = json.loads((second / "solve_report.json").read_text())
        left["metadata"].pop("timestamp")
        right["metadata"].pop("timestamp")
        assert left == right

    def test_gate_refusal(self, tmp_path, capsys):
        config = write_config(tmp_path, "big.cfg", "N = 32\nsource = mode\namplitude = 10\nenforce_gate = true\n")
        assert main(["solve-stationary", "--config", config, "--output", str(tmp_path / "out")]) == 1
        assert '"pass": false' in capsys.readouterr().err

    def test_non_convergence(self, tmp_path):
        config = write_config(tmp_path, "cap.cfg", "N = 32\ngamma = 3\namplitude = 1e-2\nmax_iters = 1\n")
        out = tmp_path / "out"
        assert main(["solve-stationary", "--config", config, "--output", str(out)]) == 2
        assert (out / "solve_report.json").exists()

    def test_divergence(self, tmp_path):
        config = write_config(tmp_path, "huge.cfg", "N = 32\ngamma = 3\namplitude = 1e6\n")
        out = tmp_path / "out"
        with np.errstate(all="ignore"):
            code = main(["solve-stationary", "--config", config, "--output", str(out)])
        assert code == ExitCode.DIVERGENCE == 3
        assert json.loads((out / "solve_report.json").read_text())["report"]["converged"] is False

    def test_unknown_key(self, tmp_path, capsys):
        config = write_config(tmp_path, "typo.cfg", "alpah = 1.5\n")
        assert main(["solve-stationary", "--config", config]) == 1
        assert "Did you mean one of these?" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert main(["solve-stationary", "--config", str(tmp_path / "absent.cfg")]) == 1

    def test_synthetic_source_needs_gamma(self, tmp_path):
        config = write_config(tmp_path, "nogamma.cfg", "N = 32\n")
        assert main(["solve-stationary", "--config", config, "--output", str(tmp_path / "out")]) == 1


class TestEvolve:
    def test_trajectory(self, tmp_path):
        config = write_config(
            tmp_path, "evolve.cfg", "N = 32\nsource = zero\ninitial = mode\namplitude = 0.5\nT = 0.1\ndt = 0.01\n"
        )
        out = tmp_path / "out"
        assert main(["evolve", "--config", config, "--output", str(out)]) == ExitCode.OK
        assert len(pd.read_csv(out / "trajectory.csv")) == 11
        assert (out / "trajectory" / "state_00000.frqs").exists()
        assert (out / "trajectory" / "state_00010.frqs").exists()
        report = json.loads((out / "evolution_report.json").read_text())
        assert report["report"]["blow_up_time"] is None

    def test_blow_up(self, tmp_path):
        config = write_config(
            tmp_path, "blow.cfg", "N = 32\nsource = zero\ninitial = mode\namplitude = 1e200\nT = 0.1\ndt = 0.01\n"
        )
        out = tmp_path / "out"
        assert main(["evolve", "--config", config, "--output", str(out)]) == 4
        report = json.loads((out / "evolution_report.json").read_text())
        assert report["report"]["blow_up_time"] == pytest.approx(0.01)

    def test_drift_dimension_mismatch(self, tmp_path, capsys):
        config = write_config(
            tmp_path, "line.cfg", "n = 1\nN = 32\nsource = zero\ninitial = mode\nT = 0.1\ndt = 0.01\n"
        )
        assert main(["evolve", "--config", config, "--output", str(tmp_path / "out")]) == ExitCode.CONFIG_ERROR
        assert "n = 2" in capsys.readouterr().err

    def test_stationarity_of_solution(self, tmp_path, mode_config):
        out = tmp_path / "out"
        main(["solve-stationary", "--config", mode_config, "--output", str(out)])
        config = write_config(tmp_path, "check.cfg", SMALL_MODE + "T = 0.1\ndt = 0.01\n")
        argv = ["evolve", "--config", config, "--output", str(out), "--check-stationary", str(out / "u.frqs")]
        assert main(argv) == ExitCode.OK

    def test_non_stationary_state(self, tmp_path, mode_config):
        out = tmp_path / "out"
        main(["solve-stationary", "--config", mode_config, "--output", str(out)])
        other = SMALL_MODE.replace("1e-4", "2e-4") + "T = 0.1\ndt = 0.01\n"
        config = write_config(tmp_path, "other.cfg", other)
        argv = ["evolve", "--config", config, "--output", str(out), "--check-stationary", str(out / "u.frqs")]
        assert main(argv) == 5


class TestAnalyze:
    def test_synthetic_only(self, tmp_path):
        config = write_config(tmp_path, "source.cfg", "N = 256\ngamma = 3\nsynthetic_only = true\n")
        out = tmp_path / "out"
        assert main(["analyze-regularity", "--config", config, "--output", str(out)]) == ExitCode.OK
        report = json.loads((out / "regularity_report.json").read_text())["report"]
        assert report["s_star_f"] == pytest.approx(2.0, abs=0.1)
        assert set(pd.read_csv(out / "shells.csv")["field"]) == {"f"}

    def test_unresolved_grid(self, tmp_path):
        config = write_config(tmp_path, "coarse.cfg", "N = 32\ngamma = 3\nsynthetic_only = true\n")
        assert main(["analyze-regularity", "--config", config, "--output", str(tmp_path / "out")]) == 6

    def test_toy_needs_beta(self, tmp_path):
        config = write_config(tmp_path, "toy.cfg", "N = 32\nalpha = 0.8\ngamma = 3\n")
        assert main(["toy-model", "--config", config, "--output", str(tmp_path / "out")]) == 1


class TestCheckConstants:
    def test_prints_gate(self, tmp_path, mode_config, capsys):
        out = tmp_path / "out"
        assert main(["check-constants", "--config", mode_config, "--output", str(out)]) == ExitCode.OK
        printed = json.loads(capsys.readouterr().out)
        assert printed["M_alpha"] == pytest.approx(72.0)
        assert json.loads((out / "gate.json").read_text())["report"]["C1_lorentz"] == pytest.approx(32.0)


class TestOutputDirectory:
    def test_environment_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FRACDRIFT_OUTPUT_DIR", str(tmp_path / "env"))
        assert resolve_output_dir(parse_run_config("")) == tmp_path / "env"

    def test_override_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FRACDRIFT_OUTPUT_DIR", str(tmp_path / "env"))
        cfg = parse_run_config(f"output_dir = {tmp_path / 'cfg'}")
        assert resolve_output_dir(cfg, str(tmp_path / "cli")) == tmp_path / "cli"
        assert resolve_output_dir(cfg) == tmp_path / "cfg"
