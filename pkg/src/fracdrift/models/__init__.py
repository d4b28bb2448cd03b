"""Pydantic models for grids, fields, operators, configurations and reports."""

from .config import SolverConfig, ToyConfig
from .fields import Grid, RealField, SpectralField
from .operators import DriftOperator, KernelOperator, RangeWarning
from .reports import (
    ETDiagnostics,
    EvolutionReport,
    GateRecord,
    IterateNorms,
    KernelEstimate,
    LadderRecord,
    LadderRung,
    RegularityReport,
    RunMetadata,
    SolveReport,
    SourceReport,
    StepRecord,
    Trajectory,
)
from .spaces import RearrangementProfile, ShellSpectrum
from .symbols import SymbolSyntaxError

__all__ = [
    # Fields
    "Grid",
    "RealField",
    "SpectralField",
    # Operators
    "DriftOperator",
    "KernelOperator",
    "RangeWarning",
    "SymbolSyntaxError",
    # Configuration
    "SolverConfig",
    "ToyConfig",
    # Function spaces
    "RearrangementProfile",
    "ShellSpectrum",
    # Reports
    "ETDiagnostics",
    "EvolutionReport",
    "GateRecord",
    "IterateNorms",
    "KernelEstimate",
    "LadderRecord",
    "LadderRung",
    "RegularityReport",
    "RunMetadata",
    "SolveReport",
    "SourceReport",
    "StepRecord",
    "Trajectory",
]
