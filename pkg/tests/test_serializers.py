"""Tests for FRQS field dumps, JSON reports and CSV series."""

import json
import struct

import numpy as np
import pandas as pd
import pytest

from fracdrift.models.fields import Grid, RealField
from fracdrift.models.operators import DriftOperator
from fracdrift.models.reports import GateRecord, IterateNorms, RunMetadata, SolveReport
from fracdrift.services.evolution_solver import evolve
from fracdrift.services.serializers import (
    FrqsFormatError,
    field_from_bytes,
    field_to_bytes,
    iterations_frame,
    read_field,
    shells_frame,
    trajectory_frame,
    write_csv,
    write_field,
    write_report,
    write_trajectory,
)


@pytest.fixture
def field():
    grid = Grid(n=2, points=8, side=3.0)
    return RealField(grid=grid, samples=np.arange(64, dtype=np.float64).reshape(8, 8) / 7.0)


@pytest.fixture
def metadata():
    return RunMetadata(package_version="0.1.0", config_digest="ab" * 32)


def solve_report(grid: Grid) -> SolveReport:
    return SolveReport(
        u=RealField.zeros(grid),
        iterates_norms=[IterateNorms(iteration=i, lorentz=0.1 * i, lp=0.2 * i) for i in (1, 2, 3)],
        updates=[1e-2, 1e-5, 1e-11],
        contraction_ratios=[1e-3, 1e-6],
        residual=3e-12,
        converged=True,
        iterations=3,
    )


class TestFrqs:
    def test_layout_is_bit_exact(self, field):
        expected = struct.pack("<4sIIId", b"FRQS", 1, 2, 8, 3.0) + field.samples.astype("<f8").tobytes()
        assert field_to_bytes(field) == expected

    def test_decode(self, field):
        decoded = field_from_bytes(field_to_bytes(field))
        assert decoded.grid == field.grid
        assert np.array_equal(decoded.samples, field.samples)

    def test_bad_magic(self, field):
        data = b"XXXX" + field_to_bytes(field)[4:]
        with pytest.raises(FrqsFormatError, match="magic"):
            field_from_bytes(data)

    def test_unknown_version(self, field):
        data = bytearray(field_to_bytes(field))
        data[4:8] = struct.pack("<I", 2)
        with pytest.raises(FrqsFormatError, match="version"):
            field_from_bytes(bytes(data))

    def test_truncated_payload(self, field):
        with pytest.raises(FrqsFormatError):
            field_from_bytes(field_to_bytes(field)[:-8])

    def test_short_header(self):
        with pytest.raises(FrqsFormatError):
            field_from_bytes(b"FRQS")

    def test_files(self, field, tmp_path):
        path = write_field(tmp_path / "nested" / "u.frqs", field)
        assert path.stat().st_size == 24 + 8 * 64
        assert np.array_equal(read_field(path).samples, field.samples)


class TestReports:
    def test_report_document(self, metadata, tmp_path):
        report = solve_report(Grid(n=2, points=8))
        path = write_report(tmp_path / "report.json", report, metadata, {"alpha": 1.5})
        document = json.loads(path.read_text())
        assert document["metadata"]["config_digest"] == "ab" * 32
        assert document["config"] == {"alpha": 1.5}
        assert document["report"]["iterations"] == 3
        assert "u" not in document["report"]

    def test_gate_uses_pass_key(self, metadata, tmp_path):
        gate = GateRecord(
            R=1e-4,
            lorentz_norm_u0=1e-4,
            lebesgue_norm_u0=5e-5,
            C_K=0.5,
            C_A=1.0,
            C1_lorentz=32.0,
            C1_of_p=32.0,
            M_alpha=72.0,
            C_alpha_n=16.0,
            eta1=1 / 128,
            eta2=1 / 144,
            eta0=1 / 144,
            in_proven_range=True,
            p_in_compact_interval=True,
            passed=True,
        )
        path = write_report(tmp_path / "gate.json", gate, metadata, {})
        document = json.loads(path.read_text())
        assert document["report"]["pass"] is True
        assert "passed" not in document["report"]


class TestFrames:
    def test_iterations_frame(self):
        frame = iterations_frame(solve_report(Grid(n=2, points=8)))
        assert list(frame.columns) == ["iter", "lorentz_norm", "lp_norm", "update", "ratio", "residual"]
        assert list(frame["iter"]) == [1, 2, 3]
        assert pd.isna(frame.loc[0, "ratio"])
        assert frame.loc[2, "ratio"] == pytest.approx(1e-6)
        assert frame["residual"].isna().sum() == 2
        assert frame.loc[2, "residual"] == pytest.approx(3e-12)

    def test_trajectory_frame(self):
        grid = Grid(n=2, points=16)
        x1, _ = grid.coordinates()
        trajectory, _ = evolve(
            RealField(grid=grid, samples=np.cos(x1)), RealField.zeros(grid), DriftOperator.sqg(), 1.5, T=0.5, dt=0.1
        )
        frame = trajectory_frame(trajectory)
        assert list(frame.columns) == ["time", "l2", "linf", "weighted_sup"]
        assert len(frame) == 6
        assert frame["linf"].iloc[-1] == pytest.approx(np.exp(-0.5))

    def test_shells_frame(self, tmp_path):
        frame = shells_frame(f=[1.0, 0.5, 0.25], u=[0.1, 0.01, 0.001])
        assert list(frame.columns) == ["field", "j", "energy"]
        assert list(frame["field"]) == ["f"] * 3 + ["u"] * 3
        written = pd.read_csv(write_csv(tmp_path / "shells.csv", frame))
        assert written.shape == (6, 3)

    def test_trajectory_dump_names(self, tmp_path):
        grid = Grid(n=1, points=16)
        (x,) = grid.coordinates()
        trajectory, _ = evolve(
            RealField(grid=grid, samples=np.sin(x)), RealField.zeros(grid), DriftOperator.zero(1), 1.0,
            T=1.0, dt=0.1, save_every=5,
        )
        paths = write_trajectory(tmp_path, trajectory)
        assert [p.name for p in paths] == ["state_00000.frqs", "state_00005.frqs", "state_00010.frqs"]
