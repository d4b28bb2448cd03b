"""Tests for the toy equation (−Δ)^{α/2}u + (−Δ)^{β/2}(u²) = f."""

import numpy as np
import pytest
from pydantic import ValidationError

from fracdrift.models.config import ToyConfig
from fracdrift.models.fields import Grid, RealField
from fracdrift.models.operators import RangeWarning
from fracdrift.services.function_spaces import lebesgue_norm
from fracdrift.services.regularity_lab import UnsupportedRangeError, synthesize_source
from fracdrift.services.stationary_solver import NonConvergenceError
from fracdrift.services.toy_model import toy_gain_experiment, toy_ladder, toy_nonlinearity, toy_residual, toy_solve


@pytest.fixture
def cfg():
    return ToyConfig(alpha=0.8, beta=0.4)


class TestToyConfig:
    def test_beta_must_stay_below_alpha(self):
        with pytest.warns(RangeWarning, match="beta"):
            ToyConfig(alpha=0.8, beta=0.9).check_ranges()

    def test_alpha_above_one_is_advisory(self):
        with pytest.warns(RangeWarning, match="toy-model regime"):
            ToyConfig(alpha=1.5, beta=0.5).check_ranges()

    def test_regime_is_silent(self, cfg, recwarn):
        assert cfg.check_ranges() == []
        assert len(recwarn) == 0


class TestToySolve:
    def test_zero_source(self, cfg):
        report = toy_solve(RealField.zeros(Grid(n=2, points=32)), cfg)
        assert report.iterations == 1
        assert report.gate is None
        assert report.ball_radius is None
        assert all(norms.lorentz is None for norms in report.iterates_norms)

    def test_small_source_converges(self, cfg):
        f = synthesize_source(2.0, 1e-3, seed=3, grid=Grid(n=2, points=64))
        report = toy_solve(f, cfg)
        assert report.converged
        assert report.residual <= 1e-8
        assert toy_residual(report.u, f, cfg) == pytest.approx(report.residual)

    def test_nonlinearity_of_constant_vanishes(self):
        grid = Grid(n=1, points=16)
        out = toy_nonlinearity(RealField.constant(grid, 3.0), 0.4)
        assert np.max(np.abs(out.samples)) <= 1e-12


class TestToyLadder:
    def test_requires_beta_below_alpha(self):
        grid = Grid(n=1, points=16)
        with pytest.raises(UnsupportedRangeError):
            toy_ladder(RealField.zeros(grid), RealField.zeros(grid), 0.5, 0.5, s=0.2)

    def test_gain_experiment(self):
        report = toy_gain_experiment(3.0, 0.8, 0.4, Grid(n=2, points=256), amplitude=1e-4)
        assert report.expected_gain == 0.8
        assert report.consistent
        assert report.ladder.step == pytest.approx(0.4)
        assert report.ladder.max_identity_residual <= 1e-6

    def test_gain_at_unit_alpha(self):
        report = toy_gain_experiment(2.0, 1.0, 0.5, Grid(n=2, points=256), amplitude=1e-3)
        assert report.gain == pytest.approx(1.0, abs=0.15)
        assert report.ladder.step == pytest.approx(0.5)
        assert all(rung.finite for rung in report.ladder.rungs)


class TestToyIterates:
    epsilon = 1e-3

    @pytest.fixture
    def plane(self):
        return Grid(n=2, points=32)

    @pytest.fixture
    def mode(self, plane):
        x1, _ = plane.coordinates()
        return RealField(grid=plane, samples=np.cos(x1))

    @pytest.fixture
    def source(self, mode):
        # |k| = 1 on cos(x1), so the α-power leaves the mode unchanged
        return mode.scaled(self.epsilon)

    def second_iterate(self, plane, cfg) -> np.ndarray:
        x1, _ = plane.coordinates()
        correction = 2 ** (cfg.beta - cfg.alpha) * np.cos(2 * x1) / 2
        return self.epsilon * np.cos(x1) - self.epsilon**2 * correction

    def test_second_iterate_closed_form(self, plane, source, cfg):
        with pytest.raises(NonConvergenceError) as excinfo:
            toy_solve(source, cfg.model_copy(update={"max_iters": 1}))
        iterate = excinfo.value.report.u.samples
        assert np.max(np.abs(iterate - self.second_iterate(plane, cfg))) <= 1e-15

    def test_limit_agrees_to_third_order(self, plane, source, cfg):
        report = toy_solve(source, cfg)
        assert np.max(np.abs(report.u.samples - self.second_iterate(plane, cfg))) <= 10 * self.epsilon**3

    def test_unique_from_two_starts(self, source, cfg):
        first = toy_solve(source, cfg)
        second = toy_solve(source, cfg, initial=first.u.scaled(0.5))
        difference = lebesgue_norm(second.u - first.u, 2.0) / lebesgue_norm(first.u, 2.0)
        assert difference <= 1e-8

    def test_report_is_frozen(self, source, cfg):
        report = toy_solve(source, cfg)
        with pytest.raises(ValidationError):
            report.residual = 0.0
