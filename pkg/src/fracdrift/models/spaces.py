"""Models for rearrangement profiles and dyadic shell spectra."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class RearrangementProfile(BaseModel):
    """
    Decreasing rearrangement g* of |g| sampled on a grid.

    ``values[i]`` is the value of g* on the measure interval
    ``[measures[i-1], measures[i])`` (with ``measures[-1] = 0``).
    """

    values: np.ndarray = Field(..., description="Non-increasing magnitudes")
    measures: np.ndarray = Field(..., description="Cumulative measure at each step")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check_monotone(self) -> "RearrangementProfile":
        if self.values.shape != self.measures.shape:
            raise ValueError("values and measures must have the same length")
        if np.any(np.diff(self.values) > 0):
            raise ValueError("rearrangement values must be non-increasing")
        if np.any(np.diff(self.measures) <= 0) or self.measures[0] <= 0:
            raise ValueError("cumulative measures must be strictly increasing and positive")
        return self

    @property
    def total_measure(self) -> float:
        return float(self.measures[-1])


class ShellSpectrum(BaseModel):
    """Energy per dyadic band 2^j <= |k| < 2^{j+1} (|k| in index units)."""

    energies: list[float] = Field(..., description="Shell energies, index j")
    dimension: int = Field(..., ge=1, le=3, description="Spatial dimension of the source field")
    points: int = Field(..., ge=8, description="Samples per axis of the source grid")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_nonnegative(self) -> "ShellSpectrum":
        if any(e < 0 for e in self.energies):
            raise ValueError("shell energies must be non-negative")
        return self

    @property
    def total(self) -> float:
        return float(sum(self.energies))
