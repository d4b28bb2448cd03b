"""Configuration models for the stationary and toy solvers."""

import warnings

from pydantic import BaseModel, ConfigDict, Field

from .operators import RangeWarning


class SolverConfig(BaseModel):
    """
    Configuration of the Picard fixed-point solver.

    Attributes:
        alpha: Fractional power α of the dissipation
        p: Lebesgue exponent of the convergence metric and of the gate
        max_iters: Maximum number of Picard iterations
        tol: Relative L^p update tolerance
        dealiased: Apply the 2/3 rule to quadratic products
        enforce_gate: Refuse to iterate when the smallness gate fails
        trials: Trial pairs for the empirical Lipschitz constant of drifts without a declared one

    Example:
        >>> cfg = SolverConfig(alpha=1.5)
        >>> cfg.max_iters
        100
    """

    alpha: float = Field(..., gt=0.0, description="Fractional power")
    p: float = Field(default=2.0, ge=1.0, description="Lebesgue exponent for diagnostics")
    max_iters: int = Field(default=100, ge=1, description="Maximum Picard iterations")
    tol: float = Field(default=1e-10, gt=0.0, description="Relative update tolerance")
    dealiased: bool = Field(default=True, description="Dealias quadratic products")
    enforce_gate: bool = Field(default=False, description="Turn gate failures into refusals")
    trials: int = Field(default=64, ge=1, description="Random trial pairs when C_A must be estimated")

    model_config = ConfigDict(frozen=True)

    def check_ranges(self, n: int) -> list[str]:
        """
        Warn about parameters outside the proven existence range.

        Returns:
            The list of advisory messages that were issued
        """
        messages = []
        if not 1.0 < self.alpha < n / 2 + 1:
            messages.append(
                f"alpha={self.alpha} outside (1, {n / 2 + 1}); convergence is not covered by the existence theory"
            )
        if self.alpha > 1.0 and self.p <= n / ((n + 1) - self.alpha):
            messages.append(f"p={self.p} <= n/((n+1)-alpha)={n / ((n + 1) - self.alpha):.4g}")
        for message in messages:
            warnings.warn(message, RangeWarning, stacklevel=2)
        return messages


class ToyConfig(SolverConfig):
    """
    Configuration of the toy-model solver (−Δ)^{α/2}u + (−Δ)^{β/2}(u²) = f.

    Inherits iteration controls from ``SolverConfig``; the gate does not
    apply to the toy model.
    """

    beta: float = Field(..., gt=0.0, description="Nonlinearity power β")

    def check_ranges(self, n: int | None = None) -> list[str]:
        messages = []
        if not self.beta < self.alpha:
            messages.append(f"beta={self.beta} must be smaller than alpha={self.alpha}")
        elif self.alpha > 1.0:
            messages.append(f"alpha={self.alpha} > 1 is outside the toy-model regime beta < alpha <= 1")
        for message in messages:
            warnings.warn(message, RangeWarning, stacklevel=2)
        return messages
