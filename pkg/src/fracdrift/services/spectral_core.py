"""Torus transforms, Fourier multipliers and dealiased products."""

import logging
import os
from collections.abc import Callable
from typing import Union

import numpy as np

from ..models.fields import Grid, RealField, SpectralField, reflected

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12

Multiplier = Union[np.ndarray, Callable[[tuple[np.ndarray, ...]], np.ndarray]]


class FracDriftError(Exception):
    """Base class of every error raised by the solvers and diagnostics."""


class InvalidInputError(FracDriftError):
    """Raised when a field carries non-finite samples."""


class AsymmetryError(FracDriftError):
    """Raised when a spectrum is not Hermitian within tolerance."""

    def __init__(self, defect: float, tolerance: float):
        self.defect = defect
        self.tolerance = tolerance
        super().__init__(
            f"Spectrum violates Hermitian symmetry: defect {defect:.3e} exceeds tolerance {tolerance:.3e}"
        )


class MultiplierDomainError(FracDriftError):
    """Raised when a multiplier is not finite at a required wavevector."""

    def __init__(self, bad_modes: int):
        self.bad_modes = bad_modes
        super().__init__(f"Multiplier is non-finite at {bad_modes} nonzero wavevector(s)")


class ShapeError(FracDriftError):
    """Raised when fields defined on different grids are combined."""

    def __init__(self, left: Grid, right: Grid):
        self.left = left
        self.right = right
        super().__init__(f"Grid mismatch: {left!r} vs {right!r}")


def _debug_checks() -> bool:
    return os.getenv("FRACDRIFT_DEBUG", "") == "1"


def require_same_grid(*fields: Union[RealField, SpectralField]) -> Grid:
    """Return the common grid of ``fields`` or raise ``ShapeError``."""
    grid = fields[0].grid
    for other in fields[1:]:
        if other.grid != grid:
            raise ShapeError(grid, other.grid)
    return grid


def forward_transform(f: RealField) -> SpectralField:
    """
    Fourier coefficients of ``f`` normalized so that the k=0 mode is the mean.

    Raises:
        InvalidInputError: If a sample is not finite

    Example:
        >>> grid = Grid(n=1, points=16)
        >>> forward_transform(RealField.constant(grid, 3.0)).modes[0]
        (3+0j)
    """
    samples = np.asarray(f.samples)
    if not np.all(np.isfinite(samples)):
        raise InvalidInputError(f"field has {int(np.sum(~np.isfinite(samples)))} non-finite samples")
    return SpectralField(grid=f.grid, modes=np.fft.fftn(samples) / f.grid.size)


def _relative_defect(values: np.ndarray) -> float:
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(values - np.conj(reflected(values))))) / scale


def hermitian_defect(F: SpectralField) -> float:
    """Max |F(k) - conj(F(-k))| relative to the largest mode magnitude."""
    return _relative_defect(F.modes)


def symmetrize(F: SpectralField) -> SpectralField:
    """Hermitian part (F(k) + conj(F(-k)))/2 of a spectrum."""
    return SpectralField(grid=F.grid, modes=0.5 * (F.modes + np.conj(reflected(F.modes))))


def inverse_transform(F: SpectralField, tolerance: float = SYMMETRY_TOLERANCE) -> RealField:
    """
    Real samples of the spectrum ``F`` (exact inverse of ``forward_transform``).

    Raises:
        AsymmetryError: If ``F`` is not Hermitian within ``tolerance``
    """
    defect = hermitian_defect(F)
    if defect > tolerance:
        raise AsymmetryError(defect, tolerance)
    samples = np.fft.ifftn(F.modes) * F.grid.size
    return RealField(grid=F.grid, samples=samples.real)


def evaluate_multiplier(grid: Grid, m: Multiplier, zero_value: complex = 0.0) -> np.ndarray:
    """
    Materialize ``m`` on the grid's wavevectors with an explicit k=0 value.

    Raises:
        MultiplierDomainError: If ``m`` is non-finite at a nonzero wavevector
    """
    if callable(m):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = np.asarray(m(grid.wavevectors()), dtype=np.complex128)
    else:
        values = np.asarray(m, dtype=np.complex128)
    values = np.array(np.broadcast_to(values, grid.shape))
    values[(0,) * grid.n] = zero_value
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise MultiplierDomainError(int(np.sum(bad)))
    return values


def apply_multiplier(F: SpectralField, m: Multiplier, zero_value: complex = 0.0) -> SpectralField:
    """
    Multiply every mode of ``F`` by the symbol ``m``.

    Args:
        F: Input spectrum
        m: Array on the mode grid or callable of the wavevector mesh
        zero_value: Symbol value at k=0 (0 annihilates the mean)

    Returns:
        SpectralField with modes m(k)·F(k)
    """
    values = evaluate_multiplier(F.grid, m, zero_value)
    result = SpectralField(grid=F.grid, modes=values * F.modes)
    if _debug_checks():
        defect = hermitian_defect(result)
        assert defect <= SYMMETRY_TOLERANCE, f"multiplier broke Hermitian symmetry ({defect:.3e})"
    return result


def realize(F: SpectralField, m: Multiplier, zero_value: complex = 0.0) -> RealField:
    """
    Physical samples of m·F for a Hermitian-compatible symbol ``m``.

    The symbol itself must satisfy m(−k) = conj(m(k)); the product is then
    Hermitian up to transform round-off, which |m| amplifies at high |k|
    and which is projected out before the inverse transform.

    Raises:
        AsymmetryError: If ``m`` is not Hermitian-compatible within tolerance
        MultiplierDomainError: If ``m`` is non-finite at a nonzero wavevector
    """
    values = evaluate_multiplier(F.grid, m, zero_value)
    defect = _relative_defect(values)
    if defect > SYMMETRY_TOLERANCE:
        raise AsymmetryError(defect, SYMMETRY_TOLERANCE)
    return inverse_transform(symmetrize(SpectralField(grid=F.grid, modes=values * F.modes)))


def multiply(f: RealField, m: Multiplier, zero_value: complex = 0.0) -> RealField:
    """Apply the multiplier ``m`` to a physical field and return physical samples."""
    return realize(forward_transform(f), m, zero_value)


def dealias(F: SpectralField) -> SpectralField:
    """Zero every mode with an axis index exceeding N/3 (the 2/3 rule)."""
    return SpectralField(grid=F.grid, modes=np.where(F.grid.dealias_mask(), F.modes, 0.0))


def pointwise_product(f: RealField, g: RealField, dealiased: bool = True) -> RealField:
    """
    Cellwise product of two fields, projected by the 2/3 rule when ``dealiased``.

    Raises:
        ShapeError: If the fields live on different grids
    """
    grid = require_same_grid(f, g)
    product = RealField(grid=grid, samples=f.samples * g.samples)
    if not dealiased:
        return product
    return inverse_transform(dealias(forward_transform(product)))


def mean_zero(f: RealField) -> RealField:
    return RealField(grid=f.grid, samples=f.samples - f.samples.mean())


def gradient(f: RealField) -> list[RealField]:
    """Spectral gradient; the derivative symbol i·k_j vanishes on Nyquist planes."""
    F = forward_transform(f)
    mask = f.grid.nyquist_free()
    return [realize(F, np.where(mask, 1j * k_j, 0.0)) for k_j in f.grid.wavevectors()]


def divergence(w: list[RealField]) -> RealField:
    """Spectral divergence Σ_j ∂_j w_j of a vector field."""
    grid = require_same_grid(*w)
    if len(w) != grid.n:
        raise ShapeError(grid, grid)
    mask = grid.nyquist_free()
    total = np.zeros(grid.shape, dtype=np.complex128)
    for k_j, component in zip(grid.wavevectors(), w):
        total += np.where(mask, 1j * k_j, 0.0) * forward_transform(component).modes
    return inverse_transform(symmetrize(SpectralField(grid=grid, modes=total)))


def _embedding_positions(coarse: int, fine: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.fft.fftfreq(coarse, d=1.0 / coarse).astype(int)
    return idx, np.mod(idx, fine)


def coarsen(f: RealField, points: int) -> RealField:
    """
    Spectral restriction of ``f`` to a grid with ``points`` samples per axis.

    Modes representable on the coarse grid are kept; the coarse Nyquist
    planes are zeroed so the result stays exactly real.
    """
    grid = f.grid
    if points > grid.points:
        raise ValueError(f"cannot coarsen {grid.points} points to {points}")
    coarse_grid = Grid(n=grid.n, points=points, side=grid.side)
    idx, positions = _embedding_positions(points, grid.points)
    modes = forward_transform(f).modes[np.ix_(*([positions] * grid.n))]
    modes = np.where(coarse_grid.nyquist_free(), modes, 0.0)
    return inverse_transform(SpectralField(grid=coarse_grid, modes=modes))


def refine(f: RealField, points: int) -> RealField:
    """Spectral zero-padding of ``f`` onto a grid with ``points`` samples per axis."""
    grid = f.grid
    if points < grid.points:
        raise ValueError(f"cannot refine {grid.points} points to {points}")
    fine_grid = Grid(n=grid.n, points=points, side=grid.side)
    _, positions = _embedding_positions(grid.points, points)
    coarse_modes = np.where(grid.nyquist_free(), forward_transform(f).modes, 0.0)
    modes = np.zeros(fine_grid.shape, dtype=np.complex128)
    modes[np.ix_(*([positions] * grid.n))] = coarse_modes
    return inverse_transform(SpectralField(grid=fine_grid, modes=modes))
