"""Spectral substrate, function-space norms, operators, solvers and regularity experiments."""

from .evolution_solver import (
    BlowUpError,
    ResolutionError,
    duhamel_linear,
    evolve,
    heat_kernel_gradient_scaling,
    heat_propagate,
    stationarity_check,
    weighted_sup_diagnostic,
)
from .function_spaces import (
    InsufficientResolutionError,
    ParameterError,
    check_interpolation,
    check_young,
    decay_exponent,
    distribution_function,
    lebesgue_norm,
    lorentz_norm,
    membership_verdict,
    rearrangement,
    refinement_stability,
    shell_energies,
    sobolev_norm,
)
from .operators import (
    DegenerateInputError,
    DimensionError,
    DivergenceFreeError,
    advective_term,
    apply_drift,
    apply_kernel,
    estimate_lipschitz_constant,
    frac_laplacian,
    inv_frac_laplacian,
    kernel_weak_norm,
    lipschitz_ratio,
    nonlinear_term,
    riesz_transform,
    sqg_drift,
)
from .regularity_lab import (
    UnsupportedRangeError,
    bootstrap_ladder,
    gain_sweep,
    holder_quotient,
    ladder_decomposition,
    leibniz_check,
    measure_gain,
    synthesize_source,
)
from .spectral_core import (
    AsymmetryError,
    FracDriftError,
    InvalidInputError,
    MultiplierDomainError,
    ShapeError,
    apply_multiplier,
    coarsen,
    dealias,
    divergence,
    forward_transform,
    gradient,
    inverse_transform,
    mean_zero,
    pointwise_product,
    realize,
    refine,
    symmetrize,
)
from .stationary_solver import (
    DivergenceError,
    GateRefusedError,
    NonConvergenceError,
    picard_solve,
    residual,
    smallness_gate,
)
from .toy_model import toy_gain_experiment, toy_ladder, toy_solve

__all__ = [
    # Spectral core
    "FracDriftError",
    "InvalidInputError",
    "AsymmetryError",
    "MultiplierDomainError",
    "ShapeError",
    "forward_transform",
    "inverse_transform",
    "apply_multiplier",
    "realize",
    "symmetrize",
    "dealias",
    "pointwise_product",
    "mean_zero",
    "gradient",
    "divergence",
    "coarsen",
    "refine",
    # Function spaces
    "ParameterError",
    "InsufficientResolutionError",
    "lebesgue_norm",
    "rearrangement",
    "distribution_function",
    "lorentz_norm",
    "sobolev_norm",
    "shell_energies",
    "decay_exponent",
    "membership_verdict",
    "refinement_stability",
    "check_interpolation",
    "check_young",
    # Operators
    "DimensionError",
    "DegenerateInputError",
    "DivergenceFreeError",
    "frac_laplacian",
    "inv_frac_laplacian",
    "riesz_transform",
    "sqg_drift",
    "apply_drift",
    "apply_kernel",
    "kernel_weak_norm",
    "nonlinear_term",
    "advective_term",
    "lipschitz_ratio",
    "estimate_lipschitz_constant",
    # Stationary solver
    "GateRefusedError",
    "DivergenceError",
    "NonConvergenceError",
    "smallness_gate",
    "picard_solve",
    "residual",
    # Evolution solver
    "BlowUpError",
    "ResolutionError",
    "heat_propagate",
    "heat_kernel_gradient_scaling",
    "weighted_sup_diagnostic",
    "evolve",
    "duhamel_linear",
    "stationarity_check",
    # Regularity lab
    "UnsupportedRangeError",
    "synthesize_source",
    "measure_gain",
    "ladder_decomposition",
    "bootstrap_ladder",
    "leibniz_check",
    "holder_quotient",
    "gain_sweep",
    # Toy model
    "toy_solve",
    "toy_ladder",
    "toy_gain_experiment",
]
