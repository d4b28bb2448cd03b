"""Report models returned by the solvers and the regularity experiments."""

from datetime import datetime, timezone
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from .fields import Grid, RealField


class RunMetadata(BaseModel):
    """Provenance attached to persisted reports."""

    package_version: str
    config_digest: str = Field(..., description="sha256 of the canonical run configuration")
    timestamp: str = Field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(),
        description="UTC creation time; the only non-deterministic report field",
    )

    model_config = ConfigDict(frozen=True)


class GateRecord(BaseModel):
    """
    Smallness-gate record: the source radius R against the thresholds η₁, η₂.

    Every factor entering the thresholds is kept so that the verdict can be
    audited. Infinite constants mark parameter ranges where a factor has a pole.
    """

    R: float = Field(..., ge=0.0, description="max of the weak-Lorentz and L^p norms of u0")
    lorentz_norm_u0: float = Field(..., ge=0.0)
    lebesgue_norm_u0: float = Field(..., ge=0.0)
    C_K: float = Field(..., gt=0.0, description="Empirical weak norm of the kernel")
    C_A: float = Field(..., gt=0.0, description="Lipschitz constant of the drift")
    C1_lorentz: float = Field(..., gt=0.0, description="Young constant of the Lorentz step")
    C1_of_p: float = Field(..., gt=0.0, description="Young constant of the L^p step at the configured p")
    M_alpha: float = Field(..., gt=0.0, description="sup of C1(p) over the compact interval I2")
    C_alpha_n: float = Field(..., gt=0.0)
    eta1: float = Field(..., ge=0.0)
    eta2: float = Field(..., ge=0.0)
    eta0: float = Field(..., ge=0.0)
    absolute_constant: float = Field(default=1.0, description="Unnamed constant C inside C1(p)")
    in_proven_range: bool = Field(..., description="1 < alpha < n/2 + 1")
    p_in_compact_interval: bool = Field(..., description="p in I2 = [2, 3n/(alpha-1)]")
    passed: bool = Field(..., alias="pass", description="R <= min(eta1, eta2)")

    model_config = ConfigDict(frozen=True, populate_by_name=True)


class IterateNorms(BaseModel):
    """Norms of one Picard iterate."""

    iteration: int
    lorentz: Optional[float] = Field(None, description="Weak norm L^{n/(alpha-1),inf}; None for the toy model")
    lp: float

    model_config = ConfigDict(frozen=True)


class SolveReport(BaseModel):
    """
    Trace of a Picard iteration.

    ``u`` is the final iterate; it is excluded from JSON dumps and persisted
    as an FRQS field instead.
    """

    u: RealField = Field(..., exclude=True)
    iterates_norms: list[IterateNorms] = Field(default_factory=list)
    updates: list[float] = Field(default_factory=list, description="Relative L^p update per iteration")
    contraction_ratios: list[float] = Field(default_factory=list)
    residual: Optional[float] = None
    ball_radius: Optional[float] = None
    gate: Optional[GateRecord] = None
    converged: bool = False
    iterations: int = 0

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ETDiagnostics(BaseModel):
    """Norms of the E_T space evaluated over a trajectory."""

    sup_lp: float = Field(..., ge=0.0)
    weighted_sup_linf: float = Field(..., ge=0.0)
    et_norm: float = Field(..., ge=0.0)
    p: float

    model_config = ConfigDict(frozen=True)


class StepRecord(BaseModel):
    """Per-step norms written to the trajectory CSV index."""

    time: float
    l2: float
    linf: float
    weighted_sup: float

    model_config = ConfigDict(frozen=True)


class Trajectory(BaseModel):
    """Snapshots of an evolution run at uniformly spaced times."""

    times: list[float]
    states: list[RealField] = Field(..., exclude=True)
    alpha: float
    dt: float
    save_every: int = 1
    steps: list[StepRecord] = Field(default_factory=list, description="Norms after every time step")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    @property
    def final(self) -> RealField:
        return self.states[-1]


class KernelEstimate(BaseModel):
    """Empirical weak norm and physical decay of the kernel K_α."""

    alpha: float
    lorentz_exponent: float
    weak_norm: float = Field(..., description="Empirical C_K")
    decay_slope: float = Field(..., description="Fitted log-log slope of |K_alpha(x)|")
    expected_slope: float = Field(..., description="alpha - (n + 1)")

    model_config = ConfigDict(frozen=True)


class LadderRung(BaseModel):
    """One rung of the bootstrap ladder."""

    order: float
    lhs_norm: float
    rhs_norm: float
    identity_residual: float = Field(..., description="Relative difference of both sides")
    coarse_ratio: float = Field(..., description="Sobolev norm on the grid over the norm on the grid coarsened by 2")
    finite: bool

    model_config = ConfigDict(frozen=True)


class LadderRecord(BaseModel):
    """Bootstrap ladder s + α = k·step + ε."""

    s: float
    total_order: float
    step: float
    k: int
    epsilon: float
    r: float
    rungs: list[LadderRung] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    @property
    def max_identity_residual(self) -> float:
        return max((rung.identity_residual for rung in self.rungs), default=0.0)


class RegularityReport(BaseModel):
    """Measured regularity gain s ↦ s + α and its optimality margin."""

    s_star_f: float
    s_star_u: float
    gain: float
    expected_gain: float
    optimality_margin: float
    tolerance: float = 0.15
    ladder: Optional[LadderRecord] = None
    holder: list[tuple[float, float]] = Field(default_factory=list, description="(sigma, quotient) pairs")
    shells_f: list[float] = Field(default_factory=list)
    shells_u: list[float] = Field(default_factory=list)
    solve: Optional[SolveReport] = None

    model_config = ConfigDict(frozen=True)

    @property
    def consistent(self) -> bool:
        """Both the gain and the optimality slope bound hold within tolerance."""
        return abs(self.gain - self.expected_gain) <= self.tolerance


class EvolutionReport(BaseModel):
    """Evolution run summary: trajectory times and norms plus the E_T diagnostics."""

    trajectory: Trajectory
    diagnostics: Optional[ETDiagnostics] = None
    blow_up_time: Optional[float] = Field(None, description="Time of the first non-finite state")

    model_config = ConfigDict(frozen=True)


class SourceReport(BaseModel):
    """Fitted regularity of a synthetic source, without solving."""

    gamma: float
    s_star_f: float
    expected_s_star: float = Field(..., description="gamma - n/2")
    shells_f: list[float] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)
