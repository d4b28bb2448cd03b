"""FracDrift - spectral solvers and diagnostics for fractional drift-diffusion equations on the torus."""

__version__ = "0.1.0"
