"""Toy equation (−Δ)^{α/2}u + (−Δ)^{β/2}(u²) = f with 0 < β < α <= 1."""

import logging
from typing import Optional

from ..models.config import ToyConfig
from ..models.fields import Grid, RealField
from ..models.reports import LadderRecord, RegularityReport, SolveReport
from .function_spaces import fractional_power, lebesgue_norm
from .operators import inv_frac_laplacian
from .regularity_lab import UnsupportedRangeError, assemble_report, climb_ladder, synthesize_source
from .spectral_core import mean_zero, pointwise_product, require_same_grid
from .stationary_solver import RESIDUAL_FLOOR, certify, iterate_fixed_point

logger = logging.getLogger(__name__)


def toy_nonlinearity(u: RealField, beta: float, dealiased: bool = True) -> RealField:
    """(−Δ)^{β/2}(u²)."""
    return fractional_power(pointwise_product(u, u, dealiased), beta)


def toy_residual(u: RealField, f: RealField, cfg: ToyConfig) -> float:
    require_same_grid(u, f)
    lhs = fractional_power(u, cfg.alpha) + toy_nonlinearity(u, cfg.beta, cfg.dealiased)
    return lebesgue_norm(lhs - mean_zero(f), 2.0) / max(lebesgue_norm(f, 2.0), RESIDUAL_FLOOR)


def toy_solve(f: RealField, cfg: ToyConfig, initial: Optional[RealField] = None) -> SolveReport:
    """
    Picard iterates of u = −(−Δ)^{(β−α)/2}(u²) + (−Δ)^{−α/2}f.

    The report carries only L^p norms: no Lorentz quantity, ball radius or
    gate is computed for the toy equation.

    Raises:
        DivergenceError: If the iteration diverges
        NonConvergenceError: If ``cfg.max_iters`` is exhausted
    """
    cfg.check_ranges()
    u0 = inv_frac_laplacian(f, cfg.alpha)
    order = cfg.beta - cfg.alpha

    def step(u: RealField) -> RealField:
        return -fractional_power(pointwise_product(u, u, cfg.dealiased), order)

    report = iterate_fixed_point(step, u0, cfg, initial, lorentz_exponent=None)
    report = certify(report, toy_residual(report.u, f, cfg), cfg)
    logger.info("toy model converged in %d iterations, residual=%.3e", report.iterations, report.residual)
    return report


def toy_ladder(
    u: RealField,
    f: RealField,
    alpha: float,
    beta: float,
    s: float,
    r: float = 2.0,
    dealiased: bool = True,
) -> LadderRecord:
    """
    Ladder s + α = k(α−β) + ε for the toy equation.

    Rung identities read (−Δ)^{o/2}u = (−Δ)^{(o−α)/2}(f − (−Δ)^{β/2}(u²)).

    Raises:
        UnsupportedRangeError: If β >= α
    """
    if not beta < alpha:
        raise UnsupportedRangeError(alpha, f"the toy ladder needs beta={beta} < alpha")
    right_side = f - toy_nonlinearity(u, beta, dealiased)
    return climb_ladder(u, right_side, alpha, alpha - beta, s, r)


def toy_gain_experiment(
    gamma: float,
    alpha: float,
    beta: float,
    grid: Grid,
    amplitude: float,
    seed: int = 0,
    cfg: Optional[ToyConfig] = None,
) -> RegularityReport:
    """
    Synthesize a source, solve the toy equation and measure the gain s*(u) − s*(f).

    The expected gain is α, with ladder rungs at multiples of α−β.
    """
    cfg = (cfg or ToyConfig(alpha=alpha, beta=beta)).model_copy(update={"alpha": alpha, "beta": beta})
    f = synthesize_source(gamma, amplitude, seed, grid)
    solve = toy_solve(f, cfg)
    return assemble_report(
        f,
        solve,
        alpha,
        lambda s: toy_ladder(solve.u, f, alpha, beta, s, 2.0, cfg.dealiased),
    )
