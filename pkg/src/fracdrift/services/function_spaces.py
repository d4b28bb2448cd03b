"""Lebesgue, Lorentz and homogeneous Sobolev norms on torus fields."""

import logging
import math

import numpy as np

from ..models.fields import RealField, SpectralField
from ..models.spaces import RearrangementProfile, ShellSpectrum
from .spectral_core import (
    FracDriftError,
    coarsen,
    forward_transform,
    inverse_transform,
    multiply,
    require_same_grid,
    symmetrize,
)

logger = logging.getLogger(__name__)

SHELL_ENERGY_FLOOR = 1e-28
MEMBERSHIP_MARGIN = 0.1
REFINEMENT_STABILITY = 1.05


class ParameterError(FracDriftError):
    """Raised when an exponent or parameter is outside its admissible range."""

    def __init__(self, name: str, value, requirement: str):
        self.name = name
        self.value = value
        self.requirement = requirement
        super().__init__(f"Invalid {name}={value!r}: {requirement}")


class InsufficientResolutionError(FracDriftError):
    """Raised when a spectrum has too few active shells for a slope fit."""

    def __init__(self, active_shells: int, required: int):
        self.active_shells = active_shells
        self.required = required
        super().__init__(
            f"Only {active_shells} shell(s) in the fit window carry energy above the floor; {required} required"
        )


def _magnitudes(f: RealField | list[RealField]) -> tuple[np.ndarray, float]:
    """Pointwise magnitude (Euclidean for vector fields) and the cell volume."""
    if isinstance(f, RealField):
        return np.abs(f.samples), f.grid.cell_volume
    grid = require_same_grid(*f)
    return np.sqrt(sum(c.samples**2 for c in f)), grid.cell_volume


def lebesgue_norm(f: RealField | list[RealField], p: float) -> float:
    """
    L^p norm by cell quadrature; p = inf gives the max of |f|.

    Vector fields (lists of components) are measured through their
    Euclidean magnitude.

    Raises:
        ParameterError: If p < 1

    Example:
        >>> grid = Grid(n=1, points=64)
        >>> round(lebesgue_norm(RealField.constant(grid, 1.0), 2.0), 6)
        2.506628
    """
    if not p >= 1:
        raise ParameterError("p", p, "must satisfy p >= 1")
    magnitude, cell_volume = _magnitudes(f)
    if math.isinf(p):
        return float(np.max(magnitude))
    peak = float(np.max(magnitude))
    if peak == 0.0:
        return 0.0
    # scale by the peak before powering to keep large p finite
    return peak * float(np.sum((magnitude / peak) ** p) * cell_volume) ** (1.0 / p)


def rearrangement(f: RealField | list[RealField]) -> RearrangementProfile:
    """
    Decreasing rearrangement of |f| against cumulative cell measure.

    Returns:
        Profile with values sorted descending and measures cellvol·(1..N^n)
    """
    magnitude, cell_volume = _magnitudes(f)
    values = np.sort(magnitude.ravel())[::-1]
    measures = cell_volume * np.arange(1, values.size + 1, dtype=np.float64)
    return RearrangementProfile(values=values, measures=measures)


def distribution_function(profile: RearrangementProfile, level: float) -> float:
    """Measure of the set where |g| exceeds ``level``, read off the profile."""
    count = int(np.sum(profile.values > level))
    return float(profile.measures[count - 1]) if count else 0.0


def lorentz_norm(f: RealField | list[RealField], p: float, q: float) -> float:
    """
    Lorentz quasi-norm ‖f‖_{L^{p,q}} from the decreasing rearrangement.

    For q = inf this is sup_t t^{1/p} g*(t); for finite q it is
    ((q/p)·∫ (t^{1/p} g*(t))^q dt/t)^{1/q}, integrated exactly on the
    piecewise-constant profile, which reduces to
    Σ_i g_i^q (t_i^{q/p} − t_{i−1}^{q/p}).

    Raises:
        ParameterError: If p <= 1 or q < 1
    """
    if not p > 1:
        raise ParameterError("p", p, "must satisfy p > 1")
    if math.isinf(p):
        raise ParameterError("p", p, "must be finite")
    if not q >= 1:
        raise ParameterError("q", q, "must satisfy q >= 1")
    profile = rearrangement(f)
    values, measures = profile.values, profile.measures
    peak = float(values[0])
    if peak == 0.0:
        return 0.0
    if math.isinf(q):
        return float(np.max(measures ** (1.0 / p) * values))
    edges = np.concatenate(([0.0], measures)) ** (q / p)
    return peak * float(np.sum((values / peak) ** q * np.diff(edges))) ** (1.0 / q)


def sobolev_norm(f: RealField, s: float, r: float) -> float:
    """
    Homogeneous Sobolev norm ‖(−Δ)^{s/2} f‖_{L^r}; the mean mode is annihilated.

    Example:
        >>> # cos(2x) on [0, 2π): (−Δ)^{1/2} cos(2x) = 2 cos(2x)
        >>> grid = Grid(n=1, points=32)
        >>> x, = grid.coordinates()
        >>> round(sobolev_norm(RealField(grid=grid, samples=np.cos(2 * x)), 1.0, 2.0), 6)
        3.544908
    """
    return lebesgue_norm(fractional_power(f, s), r)


def fractional_power(f: RealField, s: float) -> RealField:
    """(−Δ)^{s/2} f as the multiplier |k|^s, zero at k=0."""
    magnitude = f.grid.wavenumber_magnitude()
    with np.errstate(divide="ignore"):
        symbol = np.where(magnitude > 0, magnitude ** float(s), 0.0)
    return multiply(f, symbol)


def shell_energies(F: SpectralField) -> ShellSpectrum:
    """
    ℓ² energy per dyadic band 2^j <= |k| < 2^{j+1}, j = 0 .. log2(N/2) − 1.

    |k| is measured in index units so the bands do not depend on L.
    """
    grid = F.grid
    magnitude = grid.index_magnitude()
    power = np.abs(F.modes) ** 2
    shells = int(math.log2(grid.points // 2))
    energies = []
    for j in range(shells):
        band = (magnitude >= 2**j) & (magnitude < 2 ** (j + 1))
        energies.append(float(np.sum(power[band])))
    return ShellSpectrum(energies=energies, dimension=grid.n, points=grid.points)


def fit_window(spectrum: ShellSpectrum) -> range:
    """Shells used by the slope fit: j = 2 .. top − 1."""
    return range(2, len(spectrum.energies) - 1)


def decay_exponent(spectrum: ShellSpectrum) -> float:
    """
    Fitted regularity exponent s* of a shell spectrum.

    A least-squares slope of log2(energy) against j over the fit window is
    converted with energy ~ 2^{j(n − 2γ)} and s* = γ − n/2, i.e.
    s* = −slope/2.

    Raises:
        InsufficientResolutionError: If fewer than 4 shells in the window carry energy above the floor
    """
    window = [j for j in fit_window(spectrum) if spectrum.energies[j] > SHELL_ENERGY_FLOOR]
    if len(window) < 4:
        raise InsufficientResolutionError(len(window), 4)
    js = np.array(window, dtype=np.float64)
    logs = np.log2([spectrum.energies[j] for j in window])
    slope, _ = np.polyfit(js, logs, 1)
    n = spectrum.dimension
    gamma = (n - slope) / 2
    s_star = gamma - n / 2
    logger.debug("decay fit over shells %s: slope=%.4f s*=%.4f", window, slope, s_star)
    return float(s_star)


def membership_verdict(f: RealField, s: float, margin: float = MEMBERSHIP_MARGIN) -> bool:
    """Operational f ∈ Ẇ^{s,2}: s lies below the fitted exponent by ``margin``."""
    return s < decay_exponent(shell_energies(forward_transform(f))) - margin


def refinement_stability(f: RealField, s: float, r: float) -> float:
    """
    Ratio of ``sobolev_norm`` on the grid to the norm on the grid coarsened by two.

    Ratios below 1.05 are read as a finite, resolved norm.
    """
    coarse = sobolev_norm(coarsen(f, f.grid.points // 2), s, r)
    fine = sobolev_norm(f, s, r)
    if coarse == 0.0:
        return 1.0 if fine == 0.0 else math.inf
    return fine / coarse


def _reciprocal(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def check_interpolation(f: RealField, p1: float, p2: float, theta: float, q: float | None = None) -> float:
    """
    Ratio ‖f‖_{L^p} / (‖f‖_{L^{p1}}^{1−θ} ‖f‖_{L^{p2}}^θ) with 1/p = (1−θ)/p1 + θ/p2.

    With ``q`` given the numerator is the Lorentz norm ‖f‖_{L^{p,q}}; that
    ratio is bounded by a constant rather than by 1.

    Raises:
        ParameterError: Unless 1 <= p1 < p2 <= inf and 0 < θ < 1
    """
    if not 0.0 < theta < 1.0:
        raise ParameterError("theta", theta, "must satisfy 0 < theta < 1")
    if not 1.0 <= p1 < p2:
        raise ParameterError("p1, p2", (p1, p2), "must satisfy 1 <= p1 < p2 <= inf")
    inverse = (1 - theta) * _reciprocal(p1) + theta * _reciprocal(p2)
    p = math.inf if inverse == 0.0 else 1.0 / inverse
    numerator = lebesgue_norm(f, p) if q is None else lorentz_norm(f, p, q)
    denominator = lebesgue_norm(f, p1) ** (1 - theta) * lebesgue_norm(f, p2) ** theta
    if denominator == 0.0:
        return 1.0 if numerator == 0.0 else math.inf
    return numerator / denominator


def convolve(g: RealField, h: RealField) -> RealField:
    """Torus convolution ∫ g(y) h(x−y) dy via the spectral product times L^n."""
    grid = require_same_grid(g, h)
    modes = grid.volume * forward_transform(g).modes * forward_transform(h).modes
    return inverse_transform(symmetrize(SpectralField(grid=grid, modes=modes)))


def check_young(g: RealField, h: RealField, p1: float, p2: float) -> float:
    """
    Ratio ‖g∗h‖_{L^p} / (‖g‖_{L^{p1}} ‖h‖_{L^{p2}}) with 1 + 1/p = 1/p1 + 1/p2.

    Raises:
        ParameterError: If the exponents give no p in [1, inf]
    """
    inverse = _reciprocal(p1) + _reciprocal(p2) - 1.0
    if not (p1 >= 1 and p2 >= 1) or not -1e-12 <= inverse <= 1.0:
        raise ParameterError("p1, p2", (p1, p2), "need 1 + 1/p = 1/p1 + 1/p2 with p in [1, inf]")
    p = math.inf if abs(inverse) <= 1e-12 else 1.0 / inverse
    denominator = lebesgue_norm(g, p1) * lebesgue_norm(h, p2)
    numerator = lebesgue_norm(convolve(g, h), p)
    if denominator == 0.0:
        return 1.0 if numerator == 0.0 else math.inf
    return numerator / denominator
