"""Pydantic models for the periodic torus grid and the fields sampled on it."""

from functools import lru_cache
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_core import PydanticCustomError

NON_FINITE_SAMPLES = "non_finite_samples"


class Grid(BaseModel):
    """
    Uniform discretization of the torus [0, L)^n.

    Attributes:
        n: Spatial dimension (1, 2 or 3)
        points: Samples per axis, a power of two, identical on all axes
        side: Torus side length L

    Example:
        >>> grid = Grid(n=2, points=64)
        >>> grid.shape
        (64, 64)
    """

    n: int = Field(..., ge=1, le=3, description="Spatial dimension")
    points: int = Field(..., ge=8, description="Samples per axis (power of two)")
    side: float = Field(default=2 * math.pi, gt=0.0, description="Torus side length")

    model_config = ConfigDict(frozen=True)

    @field_validator("points")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"points must be a power of two, got {value}")
        return value

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.n

    @property
    def spacing(self) -> float:
        return self.side / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    @property
    def volume(self) -> float:
        return self.side ** self.n

    @property
    def size(self) -> int:
        return self.points ** self.n

    @property
    def dealias_cutoff(self) -> float:
        """Largest axis index kept by the 2/3 rule."""
        return self.points / 3

    def indices(self) -> tuple[np.ndarray, ...]:
        """Integer mode indices per axis in the symmetric range [-N/2, N/2)."""
        return _index_mesh(self.n, self.points)

    def wavevectors(self) -> tuple[np.ndarray, ...]:
        """Wavevector components k_j = (2π/L)·index_j on the full mode array."""
        return _wave_mesh(self.n, self.points, self.side)

    def wavenumber_magnitude(self) -> np.ndarray:
        """|k| on the full mode array."""
        return _wave_magnitude(self.n, self.points, self.side)

    def index_magnitude(self) -> np.ndarray:
        """|k| in integer index units (independent of L); used for dyadic shells."""
        return _index_magnitude(self.n, self.points)

    def nyquist_free(self) -> np.ndarray:
        """Mask that is False on every mode whose index equals -N/2 on some axis."""
        return _nyquist_free(self.n, self.points)

    def dealias_mask(self) -> np.ndarray:
        """Mask keeping modes whose axis indices all satisfy |index| <= N/3."""
        return _dealias_mask(self.n, self.points)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Physical sample coordinates x_j = index·L/N, row-major ('ij') mesh."""
        return _coordinate_mesh(self.n, self.points, self.side)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@lru_cache(maxsize=32)
def _index_mesh(n: int, points: int) -> tuple[np.ndarray, ...]:
    axis = np.fft.fftfreq(points, d=1.0 / points)
    return tuple(_readonly(a) for a in np.meshgrid(*([axis] * n), indexing="ij"))


@lru_cache(maxsize=32)
def _wave_mesh(n: int, points: int, side: float) -> tuple[np.ndarray, ...]:
    scale = 2 * math.pi / side
    return tuple(_readonly(scale * idx) for idx in _index_mesh(n, points))


@lru_cache(maxsize=32)
def _wave_magnitude(n: int, points: int, side: float) -> np.ndarray:
    return _readonly(np.sqrt(sum(k**2 for k in _wave_mesh(n, points, side))))


@lru_cache(maxsize=32)
def _index_magnitude(n: int, points: int) -> np.ndarray:
    return _readonly(np.sqrt(sum(i**2 for i in _index_mesh(n, points))))


@lru_cache(maxsize=32)
def _nyquist_free(n: int, points: int) -> np.ndarray:
    mask = np.ones((points,) * n, dtype=bool)
    for idx in _index_mesh(n, points):
        mask &= idx != -points // 2
    return _readonly(mask)


@lru_cache(maxsize=32)
def _dealias_mask(n: int, points: int) -> np.ndarray:
    mask = np.ones((points,) * n, dtype=bool)
    for idx in _index_mesh(n, points):
        mask &= np.abs(idx) <= points / 3
    return _readonly(mask)


@lru_cache(maxsize=32)
def _coordinate_mesh(n: int, points: int, side: float) -> tuple[np.ndarray, ...]:
    axis = np.arange(points) * (side / points)
    return tuple(_readonly(a) for a in np.meshgrid(*([axis] * n), indexing="ij"))


class RealField(BaseModel):
    """
    Physical samples of a real scalar field, one per grid cell (row-major).

    Samples are stored as a read-only float64 array of shape ``grid.shape``.
    """

    grid: Grid
    samples: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("samples", mode="before")
    @classmethod
    def _as_float_array(cls, value) -> np.ndarray:
        array = np.array(value, dtype=np.float64, copy=True)
        return _readonly(array)

    @model_validator(mode="after")
    def _check_layout(self) -> "RealField":
        if self.samples.size != self.grid.size:
            raise ValueError(
                f"expected {self.grid.size} samples for grid {self.grid.shape}, got {self.samples.size}"
            )
        if self.samples.shape != self.grid.shape:
            object.__setattr__(self, "samples", _readonly(self.samples.reshape(self.grid.shape)))
        if not np.all(np.isfinite(self.samples)):
            raise PydanticCustomError(NON_FINITE_SAMPLES, "field samples must be finite")
        return self

    @classmethod
    def zeros(cls, grid: Grid) -> "RealField":
        return cls(grid=grid, samples=np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "RealField":
        return cls(grid=grid, samples=np.full(grid.shape, float(value)))

    @property
    def mean(self) -> float:
        return float(self.samples.mean())

    def _same_grid(self, other: "RealField") -> None:
        if other.grid != self.grid:
            from ..services.spectral_core import ShapeError

            raise ShapeError(self.grid, other.grid)

    def __add__(self, other: "RealField") -> "RealField":
        self._same_grid(other)
        return RealField(grid=self.grid, samples=self.samples + other.samples)

    def __sub__(self, other: "RealField") -> "RealField":
        self._same_grid(other)
        return RealField(grid=self.grid, samples=self.samples - other.samples)

    def __neg__(self) -> "RealField":
        return RealField(grid=self.grid, samples=-self.samples)

    def scaled(self, factor: float) -> "RealField":
        return RealField(grid=self.grid, samples=factor * self.samples)


class SpectralField(BaseModel):
    """
    Fourier coefficients of a real field, normalized so the k=0 mode is the mean.

    ``modes`` is the full complex array (not the half-spectrum), indexed like
    ``numpy.fft.fftn`` output.
    """

    grid: Grid
    modes: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("modes", mode="before")
    @classmethod
    def _as_complex_array(cls, value) -> np.ndarray:
        return _readonly(np.array(value, dtype=np.complex128, copy=True))

    @model_validator(mode="after")
    def _check_layout(self) -> "SpectralField":
        if self.modes.shape != self.grid.shape:
            raise ValueError(f"expected mode array of shape {self.grid.shape}, got {self.modes.shape}")
        return self

    def energy(self) -> float:
        """Sum of |modes|^2 (mean mode included)."""
        return float(np.sum(np.abs(self.modes) ** 2))


def is_non_finite_error(exc: ValidationError) -> bool:
    """True when ``exc`` was raised because a field received non-finite samples."""
    return any(error["type"] == NON_FINITE_SAMPLES for error in exc.errors())


def reflected(modes: np.ndarray) -> np.ndarray:
    """Array whose entry at k is the entry of ``modes`` at −k (fftn index layout)."""
    return np.roll(np.flip(modes), 1, axis=tuple(range(modes.ndim)))
