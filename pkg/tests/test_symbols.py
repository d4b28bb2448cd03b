"""Tests for the symbol-expression grammar and the operator models."""

import numpy as np
import pytest
from pydantic import ValidationError

from fracdrift.models.fields import Grid
from fracdrift.models.operators import (
    DriftOperator,
    KernelOperator,
    RangeWarning,
    divergence_defect,
    hermitian_symbol_defect,
)
from fracdrift.models.symbols import SymbolSyntaxError, evaluate_symbol, normalize_expression, parse_symbol


@pytest.fixture
def grid():
    return Grid(n=2, points=16)


class TestNormalizeExpression:
    def test_magnitude_and_power(self):
        assert normalize_expression("k1^2/|k|") == "k1**2/kabs"

    def test_spaces_inside_bars(self):
        assert normalize_expression("| k |") == "kabs"

    def test_empty(self):
        with pytest.raises(SymbolSyntaxError):
            normalize_expression("   ")


class TestParseSymbol:
    @pytest.mark.parametrize("expression", ["-i*k2/|k|", "abs(k1)^0.5", "2.5*k1 - k2", "+k1/(1 + |k|^2)"])
    def test_accepts_grammar(self, expression):
        parse_symbol(expression, 2)

    @pytest.mark.parametrize(
        "expression,fragment",
        [
            ("__import__('os')", "only abs"),
            ("k3", "unknown variable"),
            ("k1 % 2", "not supported"),
            ("k1 +", "syntax error"),
            ("'a'", "constant"),
            ("sqrt(k1)", "only abs"),
        ],
    )
    def test_rejects_outside_grammar(self, expression, fragment):
        with pytest.raises(SymbolSyntaxError) as excinfo:
            parse_symbol(expression, 2)
        assert fragment in excinfo.value.reason

    def test_dimension_limits_variables(self):
        parse_symbol("k3", 3)
        with pytest.raises(SymbolSyntaxError):
            parse_symbol("k3", 2)


class TestEvaluateSymbol:
    def test_magnitude_squared(self, grid):
        values = evaluate_symbol("|k|^2", grid.wavevectors(), grid.wavenumber_magnitude())
        assert np.allclose(values, grid.wavenumber_magnitude() ** 2)

    def test_imaginary_unit(self, grid):
        values = evaluate_symbol("i*k1", grid.wavevectors(), grid.wavenumber_magnitude())
        assert np.allclose(values, 1j * grid.wavevectors()[0])

    def test_constant_broadcasts(self, grid):
        values = evaluate_symbol("0", grid.wavevectors(), grid.wavenumber_magnitude())
        assert values.shape == grid.shape
        assert np.all(values == 0)

    def test_singular_point_left_to_caller(self, grid):
        values = evaluate_symbol("1/|k|", grid.wavevectors(), grid.wavenumber_magnitude())
        assert not np.isfinite(values[0, 0])


class TestDriftOperator:
    def test_sqg(self):
        drift = DriftOperator.sqg()
        assert drift.n == 2
        assert drift.lipschitz_constant == 1.0

    def test_symbols_divergence_free(self):
        grid = Grid(n=2, points=32)
        assert divergence_defect(DriftOperator.sqg().symbols(grid), grid) <= 1e-12

    def test_symbols_zero_at_origin_and_nyquist(self):
        grid = Grid(n=2, points=32)
        for symbol in DriftOperator.sqg().symbols(grid):
            assert symbol[0, 0] == 0
            assert np.all(symbol[16, :] == 0)

    def test_rejects_compressible_drift(self):
        with pytest.raises(ValidationError):
            DriftOperator.from_expressions(["i*k1/|k|", "i*k2/|k|"])

    def test_rejects_drift_with_real_odd_symbols(self):
        with pytest.raises(ValidationError, match="conj"):
            DriftOperator.from_expressions(["-k2/|k|", "k1/|k|"])

    def test_sqg_symbols_are_hermitian(self):
        grid = Grid(n=2, points=32)
        assert hermitian_symbol_defect(DriftOperator.sqg().symbols(grid)) <= 1e-12

    def test_custom_rotated_drift(self):
        drift = DriftOperator.from_expressions(["i*k2/|k|", "-i*k1/|k|"])
        assert drift.name == "custom"
        assert drift.lipschitz_constant is None

    def test_zero_drift(self):
        grid = Grid(n=3, points=8)
        assert all(np.all(m == 0) for m in DriftOperator.zero(3).symbols(grid))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            DriftOperator.sqg().symbols(Grid(n=1, points=16))


class TestKernelOperator:
    def test_lorentz_exponent(self):
        assert KernelOperator(alpha=1.5, n=2).lorentz_exponent == pytest.approx(4 / 3)

    def test_warns_outside_integrability(self):
        with pytest.warns(RangeWarning):
            KernelOperator(alpha=3.5, n=2)

    def test_symbol_sign(self):
        grid = Grid(n=1, points=16)
        (m,) = KernelOperator(alpha=1.5, n=1).symbols(grid)
        assert m[1] == pytest.approx(-1j)
        assert m[0] == 0
