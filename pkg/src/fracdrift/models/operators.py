"""Pydantic models describing the Fourier-multiplier operators of the equation."""

import warnings
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .fields import Grid, reflected
from .symbols import evaluate_symbol, parse_symbol


class RangeWarning(UserWarning):
    """Issued when a parameter leaves the range where the analysis is proven."""


SQG_EXPRESSIONS = ("-i*k2/|k|", "i*k1/|k|")

# Tolerance of the divergence-free check, relative to |k|·max|m|.
DIV_FREE_TOLERANCE = 1e-12
# Tolerance of m(−k) = conj(m(k)), relative to max|m|.
HERMITIAN_TOLERANCE = 1e-12

_CHECK_GRID_POINTS = 16


def _bind(expressions: tuple[str, ...], grid: Grid) -> list[np.ndarray]:
    magnitude = grid.wavenumber_magnitude()
    mask = grid.nyquist_free()
    symbols = []
    for expression in expressions:
        values = evaluate_symbol(expression, grid.wavevectors(), magnitude)
        values[(0,) * grid.n] = 0.0
        values[~mask] = 0.0
        symbols.append(values)
    return symbols


def divergence_defect(symbols: list[np.ndarray], grid: Grid) -> float:
    """Return max |Σ_j k_j m_j(k)| / (|k|·max|m|) over nonzero finite modes."""
    total = np.zeros(grid.shape, dtype=np.complex128)
    for k_j, m_j in zip(grid.wavevectors(), symbols):
        total += k_j * np.nan_to_num(m_j)
    scale = grid.wavenumber_magnitude() * max(float(np.max(np.abs(np.nan_to_num(m)))) for m in symbols)
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(scale > 0, np.abs(total) / scale, 0.0)
    return float(np.max(relative))


def hermitian_symbol_defect(symbols: list[np.ndarray]) -> float:
    """Return max_j max_k |m_j(k) − conj(m_j(−k))| / max|m_j| over the bound components."""
    worst = 0.0
    for m_j in symbols:
        values = np.nan_to_num(m_j)
        scale = float(np.max(np.abs(values)))
        if scale > 0:
            worst = max(worst, float(np.max(np.abs(values - np.conj(reflected(values))))) / scale)
    return worst


def _validate(symbols: list[np.ndarray], grid: Grid) -> None:
    defect = divergence_defect(symbols, grid)
    if defect > DIV_FREE_TOLERANCE:
        raise ValueError(f"drift symbols are not divergence-free on {grid.shape} (relative defect {defect:.3e})")
    defect = hermitian_symbol_defect(symbols)
    if defect > HERMITIAN_TOLERANCE:
        raise ValueError(
            f"drift symbols do not satisfy m(-k) = conj(m(k)) on {grid.shape} (relative defect {defect:.3e}); "
            "real fields would be mapped to complex ones"
        )


class DriftOperator(BaseModel):
    """
    Description of the drift A(·) as a vector of Fourier multipliers.

    Each component is an expression in k1..kn and |k| (see ``models.symbols``).
    The symbol vector must be divergence-free, Σ_j k_j·m_j(k) = 0, and every
    component must map real fields to real fields, m_j(−k) = conj(m_j(k)).
    Both are checked on a small check grid at construction and again
    whenever the operator is bound to a grid.

    Attributes:
        name: Human-readable name ("sqg", "zero" or "custom")
        expressions: One symbol expression per spatial direction
        lipschitz_constant: Declared C_A, None when it must be estimated
        sobolev_constant: Declared Sobolev bound constant, None when unknown

    Example:
        >>> drift = DriftOperator.sqg()
        >>> drift.n
        2
    """

    name: str = Field(default="custom", description="Operator name")
    expressions: tuple[str, ...] = Field(..., min_length=1, max_length=3, description="Per-component symbols")
    lipschitz_constant: Optional[float] = Field(default=None, gt=0.0, description="Declared C_A")
    sobolev_constant: Optional[float] = Field(default=None, gt=0.0, description="Declared Sobolev bound")

    model_config = ConfigDict(frozen=True)

    @property
    def n(self) -> int:
        return len(self.expressions)

    @model_validator(mode="after")
    def _check_symbols(self) -> "DriftOperator":
        for expression in self.expressions:
            parse_symbol(expression, self.n)
        check = Grid(n=self.n, points=_CHECK_GRID_POINTS)
        _validate(_bind(self.expressions, check), check)
        return self

    @classmethod
    def sqg(cls) -> "DriftOperator":
        """Riesz drift of the surface quasi-geostrophic equation, A = (−R₂, R₁)."""
        return cls(name="sqg", expressions=SQG_EXPRESSIONS, lipschitz_constant=1.0, sobolev_constant=1.0)

    @classmethod
    def zero(cls, n: int) -> "DriftOperator":
        """The vanishing drift; turns every solver into its linear counterpart."""
        return cls(name="zero", expressions=("0",) * n, lipschitz_constant=1.0, sobolev_constant=1.0)

    @classmethod
    def from_expressions(cls, expressions: list[str]) -> "DriftOperator":
        return cls(name="custom", expressions=tuple(expressions))

    def symbols(self, grid: Grid) -> list[np.ndarray]:
        """
        Bind the component symbols to ``grid``.

        Values at k=0 and on Nyquist planes are set to zero.

        Raises:
            ValueError: If the grid dimension differs, or the symbols are not divergence-free
                or not Hermitian-compatible on it
        """
        if grid.n != self.n:
            raise ValueError(f"drift has {self.n} components but grid dimension is {grid.n}")
        symbols = _bind(self.expressions, grid)
        _validate(symbols, grid)
        return symbols


class KernelOperator(BaseModel):
    """
    The kernel K_α realizing −(−Δ)^{−α/2}div as a convolution.

    Component symbols are m_j(k) = −i·k_j/|k|^α, zero at k=0, homogeneous of
    degree 1−α.
    """

    alpha: float = Field(..., gt=0.0, description="Fractional power α")
    n: int = Field(..., ge=1, le=3, description="Spatial dimension")

    model_config = ConfigDict(frozen=True)

    @field_validator("alpha")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("alpha must be finite")
        return value

    @model_validator(mode="after")
    def _warn_integrability(self) -> "KernelOperator":
        if not 1.0 < self.alpha < self.n + 1:
            warnings.warn(
                f"kernel with alpha={self.alpha} is not locally integrable in dimension {self.n} "
                f"(expected 1 < alpha < {self.n + 1})",
                RangeWarning,
                stacklevel=2,
            )
        return self

    @property
    def lorentz_exponent(self) -> float:
        """Weak-space exponent n/((n+1)−α) of the kernel."""
        return self.n / ((self.n + 1) - self.alpha)

    def symbols(self, grid: Grid) -> list[np.ndarray]:
        if grid.n != self.n:
            raise ValueError(f"kernel dimension {self.n} differs from grid dimension {grid.n}")
        magnitude = grid.wavenumber_magnitude()
        mask = grid.nyquist_free()
        with np.errstate(divide="ignore", invalid="ignore"):
            inverse_power = np.where(magnitude > 0, magnitude ** (-self.alpha), 0.0)
        return [np.where(mask, -1j * k_j * inverse_power, 0.0) for k_j in grid.wavevectors()]
