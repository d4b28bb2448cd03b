"""Tests for the smallness gate and the Picard stationary solver."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from fracdrift.models.config import SolverConfig
from fracdrift.models.fields import Grid, RealField
from fracdrift.models.operators import DriftOperator, RangeWarning
from fracdrift.services.function_spaces import ParameterError, lebesgue_norm
from fracdrift.services.operators import inv_frac_laplacian
from fracdrift.services.regularity_lab import synthesize_source
from fracdrift.services.stationary_solver import (
    RESIDUAL_FACTOR,
    DivergenceError,
    GateRefusedError,
    NonConvergenceError,
    certify,
    compact_interval,
    iterate_fixed_point,
    picard_solve,
    residual,
    smallness_gate,
    sup_young_constant,
    young_constant_lorentz,
    young_constant_lp,
)


@pytest.fixture
def plane():
    return Grid(n=2, points=64)


@pytest.fixture
def cfg():
    return SolverConfig(alpha=1.5)


def mode_source(grid: Grid, amplitude: float) -> RealField:
    x1, _ = grid.coordinates()
    return RealField(grid=grid, samples=amplitude * np.cos(x1))


def relative_l2(a: RealField, b: RealField) -> float:
    return lebesgue_norm(a - b, 2) / lebesgue_norm(b, 2)


class TestYoungConstants:
    def test_lorentz_constant(self):
        assert young_constant_lorentz(1.5, 2) == pytest.approx(32.0)

    def test_lorentz_constant_outside_range(self):
        assert young_constant_lorentz(2.0, 2) == math.inf

    def test_lp_constant(self):
        assert young_constant_lp(2.0, 1.5, 2) == pytest.approx(32.0)
        assert young_constant_lp(12.0, 1.5, 2) == pytest.approx(72.0)

    def test_lp_constant_at_pole(self):
        assert young_constant_lp(4 / 3, 1.5, 2) == math.inf

    def test_compact_interval(self):
        assert compact_interval(1.5, 2) == (2.0, 12.0)

    def test_supremum(self):
        assert sup_young_constant(1.5, 2) == pytest.approx(72.0)


class TestSmallnessGate:
    def test_thresholds(self, plane, cfg):
        gate = smallness_gate(mode_source(plane, 1e-6), cfg)
        assert gate.C1_lorentz == pytest.approx(32.0)
        assert gate.M_alpha == pytest.approx(72.0)
        assert gate.C_A == 1.0
        assert gate.eta1 == pytest.approx(1 / (8 * 32 * gate.C_K))
        assert gate.eta2 == pytest.approx(1 / (4 * 72 * gate.C_K))
        assert gate.eta0 == min(gate.eta1, gate.eta2)
        assert gate.in_proven_range
        assert gate.p_in_compact_interval

    def test_small_source_passes(self, plane, cfg):
        gate = smallness_gate(mode_source(plane, 1e-6), cfg)
        assert gate.passed
        assert gate.R == max(gate.lorentz_norm_u0, gate.lebesgue_norm_u0)

    def test_large_source_fails(self, plane, cfg):
        assert not smallness_gate(mode_source(plane, 10.0), cfg).passed

    def test_serialized_with_pass_key(self, plane, cfg):
        dumped = smallness_gate(mode_source(plane, 1e-6), cfg).model_dump(by_alias=True)
        assert dumped["pass"] is True

    def test_rejects_alpha_outside_kernel_range(self, plane):
        with pytest.raises(ParameterError):
            smallness_gate(mode_source(plane, 1e-6), SolverConfig(alpha=3.5))

    def test_rejects_p_at_pole(self, plane):
        with pytest.raises(ParameterError) as excinfo:
            smallness_gate(mode_source(plane, 1e-6), SolverConfig(alpha=1.5, p=4 / 3))
        assert excinfo.value.name == "p"

    def test_warns_outside_compact_interval(self, plane):
        with pytest.warns(RangeWarning):
            smallness_gate(mode_source(plane, 1e-6), SolverConfig(alpha=1.5, p=20.0))

    def test_zero_drift_uses_estimated_constant(self, cfg):
        grid = Grid(n=2, points=16)
        undeclared = DriftOperator.zero(2).model_copy(update={"lipschitz_constant": None})
        gate = smallness_gate(mode_source(grid, 1e-6), cfg.model_copy(update={"trials": 2}), undeclared)
        assert gate.C_A > 0


class TestResidual:
    def test_linear_solution(self, plane):
        f = mode_source(plane, 0.3)
        u = RealField(grid=plane, samples=f.samples)  # |k| = 1 for cos(x1)
        assert residual(u, f, DriftOperator.zero(2), 1.5) <= 1e-13

    def test_non_zero_mean_is_ignored(self, plane, caplog):
        f = mode_source(plane, 0.3) + RealField.constant(plane, 1.0)
        u = mode_source(plane, 0.3)
        value = residual(u, f, DriftOperator.zero(2), 1.5)
        assert value <= 1e-13
        assert "non-zero mean" in caplog.text


class TestIterateFixedPoint:
    def test_contraction_ratios(self):
        grid = Grid(n=1, points=8)
        cfg = SolverConfig(alpha=1.5, max_iters=200)
        report = iterate_fixed_point(lambda u: u.scaled(0.5), RealField.constant(grid, 1.0), cfg)
        assert report.converged
        assert np.allclose(report.u.samples, 2.0)
        assert all(r == pytest.approx(0.5) for r in report.contraction_ratios)

    def test_non_convergence_carries_report(self):
        grid = Grid(n=1, points=8)
        cfg = SolverConfig(alpha=1.5, max_iters=3)
        with pytest.raises(NonConvergenceError) as excinfo:
            iterate_fixed_point(lambda u: u.scaled(0.5), RealField.constant(grid, 1.0), cfg)
        assert excinfo.value.report.iterations == 3
        assert len(excinfo.value.report.updates) == 3

    def test_growing_updates_diverge(self):
        grid = Grid(n=1, points=8)
        u0 = RealField.constant(grid, 1.0)
        start = RealField.constant(grid, -1.0 + 1e-6)
        cfg = SolverConfig(alpha=1.5, tol=1e-14)
        with pytest.raises(DivergenceError) as excinfo:
            iterate_fixed_point(lambda u: u.scaled(2.0), u0, cfg, initial=start)
        assert excinfo.value.report.iterations == 7

    def test_overflow_diverges(self):
        grid = Grid(n=1, points=8)
        cfg = SolverConfig(alpha=1.5)
        with np.errstate(over="ignore", invalid="ignore"), pytest.raises(DivergenceError):
            iterate_fixed_point(
                lambda u: RealField(grid=grid, samples=u.samples**2), RealField.constant(grid, 2.0), cfg
            )

    def test_certify_rejects_large_residual(self):
        grid = Grid(n=1, points=8)
        cfg = SolverConfig(alpha=1.5, tol=1e-10)
        report = iterate_fixed_point(lambda u: u.scaled(0.5), RealField.constant(grid, 1.0), cfg)
        with pytest.raises(NonConvergenceError) as excinfo:
            certify(report, 1.0, cfg)
        assert excinfo.value.report.converged is False
        assert excinfo.value.report.residual == 1.0
        assert report.converged

    def test_certify_keeps_small_residual(self):
        grid = Grid(n=1, points=8)
        cfg = SolverConfig(alpha=1.5, tol=1e-10)
        report = iterate_fixed_point(lambda u: u.scaled(0.5), RealField.constant(grid, 1.0), cfg)
        certified = certify(report, 50 * cfg.tol, cfg)
        assert certified.converged
        assert certified.residual == pytest.approx(5e-9)


class TestPicardSolve:
    def test_zero_source(self, plane, cfg):
        report = picard_solve(RealField.zeros(plane), DriftOperator.sqg(), cfg)
        assert report.converged
        assert report.iterations == 1
        assert np.all(report.u.samples == 0)
        assert report.residual == 0.0

    def test_single_mode_is_exact(self, plane, cfg):
        f = mode_source(plane, 1e-4)
        report = picard_solve(f, DriftOperator.sqg(), cfg)
        assert report.iterations == 1
        assert np.allclose(report.u.samples, f.samples, atol=1e-16)
        assert report.residual <= 1e-12

    def test_random_source_converges(self, plane, cfg):
        f = synthesize_source(3.0, 1e-4, seed=1, grid=plane)
        report = picard_solve(f, DriftOperator.sqg(), cfg)
        assert report.converged
        assert report.residual <= 1e-8
        assert report.gate.passed
        assert report.ball_radius <= report.gate.R
        assert all(ratio < 1 for ratio in report.contraction_ratios)

    def test_unique_from_two_starts(self, plane, cfg):
        f = synthesize_source(3.0, 1e-4, seed=2, grid=plane)
        _, x2 = plane.coordinates()
        first = picard_solve(f, DriftOperator.sqg(), cfg)
        perturbed = first.u + RealField(grid=plane, samples=1e-4 * np.cos(x2))
        second = picard_solve(f, DriftOperator.sqg(), cfg, initial=perturbed)
        assert relative_l2(second.u, first.u) <= 1e-8

    def test_rotation_equivariance(self, plane, cfg):
        f = synthesize_source(3.0, 1e-4, seed=3, grid=plane)
        rotated = RealField(grid=plane, samples=np.rot90(f.samples))
        u = picard_solve(f, DriftOperator.sqg(), cfg).u
        u_rotated = picard_solve(rotated, DriftOperator.sqg(), cfg).u
        expected = RealField(grid=plane, samples=np.rot90(u.samples))
        assert relative_l2(u_rotated, expected) <= 1e-10

    def test_zero_drift_is_linear(self, plane, cfg):
        f = synthesize_source(2.0, 1.0, seed=4, grid=plane)
        report = picard_solve(f, DriftOperator.zero(2), cfg)
        assert report.iterations == 1
        assert report.residual <= 1e-12

    def test_enforced_gate_refuses(self, plane):
        cfg = SolverConfig(alpha=1.5, enforce_gate=True)
        with pytest.raises(GateRefusedError) as excinfo:
            picard_solve(mode_source(plane, 10.0), DriftOperator.sqg(), cfg)
        assert not excinfo.value.gate.passed

    def test_enforced_gate_rejects_bad_alpha(self, plane):
        cfg = SolverConfig(alpha=3.5, enforce_gate=True)
        with pytest.warns(RangeWarning), pytest.raises(ParameterError):
            picard_solve(mode_source(plane, 1e-6), DriftOperator.sqg(), cfg)

    def test_failed_gate_warns_without_enforcement(self, plane, cfg):
        with pytest.warns(RangeWarning, match="smallness gate failed"):
            report = picard_solve(mode_source(plane, 10.0), DriftOperator.sqg(), cfg)
        # a single mode is an exact solution at any amplitude
        assert report.converged

    def test_report_is_frozen(self, plane, cfg):
        report = picard_solve(mode_source(plane, 1e-4), DriftOperator.sqg(), cfg)
        with pytest.raises(ValidationError):
            report.residual = 0.0

    def test_converged_residual_within_tolerance_factor(self, plane, cfg):
        f = synthesize_source(3.0, 1e-4, seed=8, grid=plane)
        report = picard_solve(f, DriftOperator.sqg(), cfg)
        assert report.converged
        assert report.residual <= RESIDUAL_FACTOR * cfg.tol


class TestModerateAmplitude:
    """Random sources at amplitude 1e-3."""

    @pytest.fixture
    def source(self, plane):
        return synthesize_source(3.0, 1e-3, seed=1, grid=plane)

    @pytest.fixture
    def solved(self, source, cfg):
        return picard_solve(source, DriftOperator.sqg(), cfg)

    def test_contracts_quickly(self, solved):
        assert solved.converged
        assert solved.iterations <= 30
        assert max(solved.contraction_ratios) < 0.6
        assert solved.residual <= 1e-8

    def test_unique_from_scaled_start(self, source, solved, cfg):
        u0 = inv_frac_laplacian(source, cfg.alpha)
        second = picard_solve(source, DriftOperator.sqg(), cfg, initial=u0.scaled(0.5))
        assert relative_l2(second.u, solved.u) <= 1e-8

    def test_single_mode_correction_vanishes(self, plane, cfg):
        epsilon = 1e-3
        report = picard_solve(mode_source(plane, epsilon), DriftOperator.sqg(), cfg)
        x1, _ = plane.coordinates()
        assert np.max(np.abs(report.u.samples - epsilon * np.cos(x1))) <= 10 * epsilon**2

    def test_first_order_linearity(self, plane):
        cfg = SolverConfig(alpha=1.5, tol=1e-12)
        shape = synthesize_source(3.0, 1.0, seed=5, grid=plane)

        def quadratic_defect(scale: float) -> float:
            f = shape.scaled(scale)
            u = picard_solve(f, DriftOperator.sqg(), cfg).u
            return lebesgue_norm(u - inv_frac_laplacian(f, 1.5), 2) / scale**2

        large, small = quadratic_defect(1e-3), quadratic_defect(5e-4)
        assert large > 0
        assert small == pytest.approx(large, rel=0.1)
