"""Picard construction of small stationary solutions with the smallness gate."""

import logging
import math
import warnings
from collections.abc import Callable
from functools import lru_cache
from typing import Optional

import numpy as np
from pydantic import ValidationError

from ..models.config import SolverConfig
from ..models.fields import RealField, is_non_finite_error
from ..models.operators import DriftOperator, KernelOperator, RangeWarning
from ..models.reports import GateRecord, IterateNorms, SolveReport
from .function_spaces import ParameterError, lebesgue_norm, lorentz_norm
from .operators import (
    apply_drift,
    apply_kernel,
    estimate_lipschitz_constant,
    frac_laplacian,
    inv_frac_laplacian,
    kernel_weak_norm,
    nonlinear_term,
)
from .spectral_core import FracDriftError, InvalidInputError, mean_zero, pointwise_product, require_same_grid

logger = logging.getLogger(__name__)

ABSOLUTE_CONSTANT = 1.0
RESIDUAL_FLOOR = 1e-300
RESIDUAL_FACTOR = 100.0
DIVERGENCE_FACTOR = 10.0
DIVERGENCE_STREAK = 3
COMPACT_INTERVAL_SAMPLES = 2001


class GateRefusedError(FracDriftError):
    """Raised when ``enforce_gate`` is set and the smallness gate fails."""

    def __init__(self, gate: GateRecord):
        self.gate = gate
        super().__init__(f"Smallness gate failed: R={gate.R:.4g} > eta0={gate.eta0:.4g}")


class DivergenceError(FracDriftError):
    """Raised when the iteration updates keep growing; carries the partial report."""

    def __init__(self, report: SolveReport):
        self.report = report
        super().__init__(f"Picard iteration diverged after {report.iterations} iterations")


class NonConvergenceError(FracDriftError):
    """Raised when ``max_iters`` is reached above tolerance; carries the report."""

    def __init__(self, report: SolveReport):
        self.report = report
        last = report.updates[-1] if report.updates else float("nan")
        super().__init__(f"No convergence after {report.iterations} iterations (last update {last:.3e})")


def weak_exponent(alpha: float, n: int) -> float:
    """Exponent n/(α−1) of the weak-Lorentz space carrying the solution."""
    return n / (alpha - 1)


def young_constant_lp(p: float, alpha: float, n: int, absolute_constant: float = ABSOLUTE_CONSTANT) -> float:
    """
    C₁(p) = C·p·(n/(α−1))·(np/(p((n+1)−α)−n)); infinite at and below the pole.
    """
    denominator = p * ((n + 1) - alpha) - n
    if denominator <= 0:
        return math.inf
    return absolute_constant * p * (n / (alpha - 1)) * (n * p / denominator)


def young_constant_lorentz(alpha: float, n: int) -> float:
    """
    Young constant of the weak-Lorentz step, p·p1'·p2' with
    p = n/(α−1), p1 = n/((n+1)−α), p2 = n/(2(α−1)).

    Equals (n/(α−1))²·n/(n−2α+2); infinite once α >= n/2+1.
    """
    tail = n - 2 * alpha + 2
    if tail <= 0:
        return math.inf
    return (n / (alpha - 1)) ** 2 * n / tail


def compact_interval(alpha: float, n: int) -> tuple[float, float]:
    """The interval [2, 3n/(α−1)] on which the L^p constant is maximized."""
    return 2.0, 3 * n / (alpha - 1)


def sup_young_constant(alpha: float, n: int) -> float:
    """M_α: supremum of C₁(p) over the compact interval, sampled densely."""
    low, high = compact_interval(alpha, n)
    if high < low:
        return young_constant_lp(low, alpha, n)
    return max(young_constant_lp(p, alpha, n) for p in np.linspace(low, high, COMPACT_INTERVAL_SAMPLES))


@lru_cache(maxsize=16)
def _kernel_constant(kernel: KernelOperator) -> float:
    return kernel_weak_norm(kernel).weak_norm


def drift_constant(A: DriftOperator, f: RealField, cfg: SolverConfig) -> float:
    """Declared C_A of the drift, or the estimate at the weak-Lorentz index."""
    if A.lipschitz_constant is not None:
        return A.lipschitz_constant
    exponent = weak_exponent(cfg.alpha, f.grid.n)
    estimate = estimate_lipschitz_constant(A, f.grid, exponent, math.inf, trials=cfg.trials)
    # a vanishing drift still needs a positive constant in the thresholds
    return max(estimate, np.finfo(np.float64).tiny)


def smallness_gate(f: RealField, cfg: SolverConfig, A: Optional[DriftOperator] = None) -> GateRecord:
    """
    Evaluate the smallness condition R <= η₀ = min(η₁, η₂) for the source ``f``.

    R is the larger of ‖u₀‖_{L^{n/(α−1),∞}} and ‖u₀‖_{L^p} with
    u₀ = (−Δ)^{−α/2}f. The thresholds are η₁ = 1/(8·C_{α,n}) with
    C_{α,n} = C1_lorentz·C_K·C_A and η₂ = 1/(4·M_α·C_K·C_A).

    Args:
        f: Source term
        cfg: Solver configuration providing α and p
        A: Drift operator (SQG in two dimensions when omitted)

    Returns:
        GateRecord with every constant used

    Raises:
        ParameterError: If α is outside (1, n+1) or p <= n/((n+1)−α)
    """
    grid = f.grid
    n, alpha, p = grid.n, cfg.alpha, cfg.p
    if not 1.0 < alpha < n + 1:
        raise ParameterError("alpha", alpha, f"the gate needs 1 < alpha < {n + 1}")
    pole = n / ((n + 1) - alpha)
    if p <= pole:
        raise ParameterError("p", p, f"must exceed n/((n+1)-alpha) = {pole:.6g}")
    if A is None:
        A = DriftOperator.sqg() if n == 2 else DriftOperator.zero(n)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RangeWarning)
        kernel = KernelOperator(alpha=alpha, n=n)
    C_K = _kernel_constant(kernel)
    C_A = drift_constant(A, f, cfg)

    u0 = inv_frac_laplacian(f, alpha)
    lorentz_u0 = lorentz_norm(u0, weak_exponent(alpha, n), math.inf)
    lebesgue_u0 = lebesgue_norm(u0, p)
    R = max(lorentz_u0, lebesgue_u0)

    C1_lorentz = young_constant_lorentz(alpha, n)
    C1_of_p = young_constant_lp(p, alpha, n)
    M_alpha = sup_young_constant(alpha, n)
    C_alpha_n = C1_lorentz * C_K * C_A
    eta1 = 1.0 / (8 * C_alpha_n)
    eta2 = 1.0 / (4 * M_alpha * C_K * C_A)
    eta0 = min(eta1, eta2)
    low, high = compact_interval(alpha, n)
    record = GateRecord(
        R=R,
        lorentz_norm_u0=lorentz_u0,
        lebesgue_norm_u0=lebesgue_u0,
        C_K=C_K,
        C_A=C_A,
        C1_lorentz=C1_lorentz,
        C1_of_p=C1_of_p,
        M_alpha=M_alpha,
        C_alpha_n=C_alpha_n,
        eta1=eta1,
        eta2=eta2,
        eta0=eta0,
        absolute_constant=ABSOLUTE_CONSTANT,
        in_proven_range=1.0 < alpha < n / 2 + 1,
        p_in_compact_interval=low <= p <= high,
        passed=R <= eta0,
    )
    if not record.in_proven_range:
        warnings.warn(f"alpha={alpha} outside (1, {n / 2 + 1}); the gate thresholds vanish", RangeWarning, stacklevel=2)
    if not record.p_in_compact_interval:
        warnings.warn(f"p={p} outside the compact interval [{low:g}, {high:.6g}]", RangeWarning, stacklevel=2)
    logger.info("gate: R=%.4g eta1=%.4g eta2=%.4g pass=%s", R, eta1, eta2, record.passed)
    return record


def residual(u: RealField, f: RealField, A: DriftOperator, alpha: float, dealiased: bool = True) -> float:
    """
    Relative residual ‖(−Δ)^{α/2}u + div(u·A(u)) − f‖_{L²} / ‖f‖_{L²}.

    The mean of ``f`` has no preimage on the torus, so the equation is
    tested against the mean-zero part of ``f``.
    """
    require_same_grid(u, f)
    if abs(f.mean) > 0.0:
        logger.warning("source has non-zero mean %.3e; residual uses its mean-zero part", f.mean)
    lhs = frac_laplacian(u, alpha) + nonlinear_term(u, A, dealiased)
    return lebesgue_norm(lhs - mean_zero(f), 2.0) / max(lebesgue_norm(f, 2.0), RESIDUAL_FLOOR)


def iterate_fixed_point(
    step: Callable[[RealField], RealField],
    u0: RealField,
    cfg: SolverConfig,
    initial: Optional[RealField] = None,
    lorentz_exponent: Optional[float] = None,
) -> SolveReport:
    """
    Run u_n = step(u_{n−1}) + u₀ from ``initial`` (u₀ by default).

    Stops when the relative L^p update drops to ``cfg.tol``.

    Returns:
        Report with ``converged`` set; residual and certificate are left to the caller

    Raises:
        DivergenceError: If the update exceeds 10× the first update three times
            in a row, or an iterate overflows
        NonConvergenceError: If ``cfg.max_iters`` is exhausted
    """
    u = initial if initial is not None else u0
    norms: list[IterateNorms] = []
    updates: list[float] = []
    ratios: list[float] = []

    def trace(converged: bool = False) -> SolveReport:
        return SolveReport(
            u=u,
            iterates_norms=list(norms),
            updates=list(updates),
            contraction_ratios=list(ratios),
            converged=converged,
            iterations=len(updates),
        )

    first_update: Optional[float] = None
    previous_step: Optional[float] = None
    streak = 0
    for iteration in range(1, cfg.max_iters + 1):
        try:
            new = step(u) + u0
        except (FloatingPointError, InvalidInputError) as exc:
            raise DivergenceError(trace()) from exc
        except ValidationError as exc:
            if not is_non_finite_error(exc):
                raise
            raise DivergenceError(trace()) from exc
        step_norm = lebesgue_norm(new - u, cfg.p)
        new_norm = lebesgue_norm(new, cfg.p)
        update = step_norm / new_norm if new_norm > 0 else step_norm
        updates.append(update)
        norms.append(
            IterateNorms(
                iteration=iteration,
                lorentz=None if lorentz_exponent is None else lorentz_norm(new, lorentz_exponent, math.inf),
                lp=new_norm,
            )
        )
        if previous_step:
            ratios.append(step_norm / previous_step)
        previous_step = step_norm
        u = new
        logger.debug("iteration %d: update=%.3e", iteration, update)
        if not np.isfinite(update):
            raise DivergenceError(trace())
        if update <= cfg.tol:
            return trace(converged=True)
        if first_update is None:
            first_update = update
        elif update > DIVERGENCE_FACTOR * first_update:
            streak += 1
            if streak >= DIVERGENCE_STREAK:
                raise DivergenceError(trace())
        else:
            streak = 0
    raise NonConvergenceError(trace())


def certify(report: SolveReport, residual_value: float, cfg: SolverConfig, **extra) -> SolveReport:
    """
    Attach the residual (and any ``extra`` fields) to a converged report.

    Raises:
        NonConvergenceError: If the update converged but the residual exceeds
            100·tol; the report then carries ``converged=False``
    """
    final = report.model_copy(update={"residual": residual_value, **extra})
    if residual_value > RESIDUAL_FACTOR * cfg.tol:
        logger.warning(
            "update reached tol=%.1e but residual %.3e exceeds %g*tol", cfg.tol, residual_value, RESIDUAL_FACTOR
        )
        raise NonConvergenceError(final.model_copy(update={"converged": False}))
    return final


def picard_solve(
    f: RealField,
    A: DriftOperator,
    cfg: SolverConfig,
    initial: Optional[RealField] = None,
) -> SolveReport:
    """
    Solve (−Δ)^{α/2}u + div(u·A(u)) = f by the Picard iteration
    u_n = K_α ∗ (u_{n−1}·A(u_{n−1})) + (−Δ)^{−α/2}f.

    Args:
        f: Source term
        A: Divergence-free drift operator
        cfg: Solver configuration
        initial: Starting iterate (defaults to u₀ = (−Δ)^{−α/2}f)

    Returns:
        SolveReport with the solution, iteration history, residual,
        ball radius ‖u − u₀‖_{L^{n/(α−1),∞}} and gate record

    Raises:
        GateRefusedError: If ``cfg.enforce_gate`` and the gate fails
        DivergenceError: If the iteration diverges
        NonConvergenceError: If ``cfg.max_iters`` is exhausted

    Example:
        >>> grid = Grid(n=2, points=32)
        >>> report = picard_solve(RealField.zeros(grid), DriftOperator.sqg(), SolverConfig(alpha=1.5))
        >>> report.iterations
        1
    """
    grid = f.grid
    n, alpha = grid.n, cfg.alpha
    if initial is not None:
        require_same_grid(f, initial)
    cfg.check_ranges(n)

    gate: Optional[GateRecord] = None
    try:
        gate = smallness_gate(f, cfg, A)
    except ParameterError as exc:
        if cfg.enforce_gate:
            raise
        warnings.warn(f"smallness gate not evaluated: {exc}", RangeWarning, stacklevel=2)
    if gate is not None and not gate.passed:
        if cfg.enforce_gate:
            raise GateRefusedError(gate)
        warnings.warn(
            f"smallness gate failed (R={gate.R:.4g} > eta0={gate.eta0:.4g}); iterating anyway",
            RangeWarning,
            stacklevel=2,
        )

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RangeWarning)
        kernel = KernelOperator(alpha=alpha, n=n)
    u0 = inv_frac_laplacian(f, alpha)

    def step(u: RealField) -> RealField:
        return apply_kernel(kernel, [pointwise_product(u, a_j, cfg.dealiased) for a_j in apply_drift(A, u)])

    exponent = weak_exponent(alpha, n) if alpha > 1 else None
    try:
        report = iterate_fixed_point(step, u0, cfg, initial, exponent)
    except (DivergenceError, NonConvergenceError) as exc:
        exc.report = exc.report.model_copy(update={"gate": gate})
        raise
    ball_radius = None if exponent is None else lorentz_norm(report.u - u0, exponent, math.inf)
    report = certify(
        report,
        residual(report.u, f, A, alpha, cfg.dealiased),
        cfg,
        gate=gate,
        ball_radius=ball_radius,
    )
    logger.info(
        "picard converged in %d iterations, residual=%.3e, ball radius=%s",
        report.iterations,
        report.residual,
        report.ball_radius,
    )
    return report
