"""Flat key=value run configuration, validated with pydantic before any computation."""

import hashlib
import json
import re
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from thefuzz import process

from ..models.config import SolverConfig, ToyConfig
from ..models.fields import Grid
from ..models.operators import DriftOperator
from ..models.symbols import SymbolSyntaxError

_LINE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$")
_DRIFT_COMPONENT = re.compile(r"^drift\.([1-3])$")
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}

SourceKind = Literal["synthetic", "mode", "zero"]


class ConfigError(Exception):
    """Raised for unreadable, unknown or invalid configuration entries."""

    def __init__(self, key: str, message: str, suggestions: Optional[list[str]] = None):
        self.key = key
        self.suggestions = suggestions or []
        text = f"Invalid config key '{key}': {message}"
        if self.suggestions:
            text += "\nDid you mean one of these?\n" + "\n".join(
                f"  {i}. {s}" for i, s in enumerate(self.suggestions[:5], 1)
            )
        super().__init__(text)


def parse_bool(value: str) -> bool:
    """
    Parse a boolean config value.

    Examples:
        >>> parse_bool("Yes")
        True
        >>> parse_bool("0")
        False
    """
    lowered = value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got '{value}'")


def parse_number(value: str) -> Union[int, float]:
    """
    Parse an integer or a float (``inf`` accepted).

    Examples:
        >>> parse_number("256")
        256
        >>> parse_number("1e-3")
        0.001
    """
    text = value.strip()
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    return float(text)


def parse_line(line: str) -> Optional[tuple[str, str]]:
    """Split ``key = value``; blank lines and ``#`` comments give None."""
    stripped = line.split("#", 1)[0].strip()
    if not stripped:
        return None
    match = _LINE.match(stripped)
    if not match:
        raise ConfigError(stripped, "expected a 'key = value' line")
    return match.group(1), match.group(2)


class RunConfig(BaseModel):
    """
    Validated run configuration shared by every subcommand.

    Attributes mirror the keys of the config file. ``drift`` is either
    "sqg", "zero" or "custom"; custom drifts list their component symbols
    as ``drift.1``, ``drift.2``, … lines.

    Example:
        >>> cfg = RunConfig(n=2, N=64, alpha=1.5)
        >>> cfg.grid().shape
        (64, 64)
    """

    n: int = Field(default=2, ge=1, le=3, description="Spatial dimension")
    N: int = Field(default=128, ge=8, description="Samples per axis (power of two)")
    L: float = Field(default=6.283185307179586, gt=0.0, description="Torus side")
    alpha: float = Field(default=1.5, gt=0.0, description="Fractional power")
    beta: Optional[float] = Field(default=None, gt=0.0, description="Toy-model nonlinearity power")
    p: float = Field(default=2.0, ge=1.0, description="Lebesgue exponent of diagnostics")
    gamma: Optional[float] = Field(default=None, gt=0.0, description="Spectral decay of synthetic sources")
    amplitude: float = Field(default=1e-3, ge=0.0, description="Source amplitude")
    seed: int = Field(default=0, ge=0, description="Seed of synthetic sources")
    T: float = Field(default=1.0, ge=0.0, description="Final time of evolve")
    dt: float = Field(default=1e-3, gt=0.0, description="Time step of evolve")
    tol: float = Field(default=1e-10, gt=0.0, description="Picard tolerance")
    max_iters: int = Field(default=100, ge=1, description="Picard iteration cap")
    drift: Literal["sqg", "zero", "custom"] = Field(default="sqg", description="Drift operator")
    drift_components: Optional[list[str]] = Field(default=None, description="Custom drift symbols")
    dealiased: bool = Field(default=True)
    enforce_gate: bool = Field(default=False)
    output_dir: Optional[str] = Field(default=None)
    source: SourceKind = Field(default="synthetic", description="Source term of solve/evolve")
    initial: SourceKind = Field(default="mode", description="Initial datum of evolve")
    synthetic_only: bool = Field(default=False, description="analyze-regularity without a solve")
    stationary_threshold: float = Field(default=1e-6, gt=0.0)
    trials: int = Field(default=64, ge=1, description="Lipschitz trials for custom drifts")
    save_every: Optional[int] = Field(default=None, ge=1, description="Trajectory snapshot stride")

    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("N")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"N must be a power of two, got {value}")
        return value

    @model_validator(mode="after")
    def _check_drift(self) -> "RunConfig":
        if self.drift == "custom":
            if not self.drift_components or len(self.drift_components) != self.n:
                raise ValueError(f"custom drift needs drift.1 .. drift.{self.n}")
            try:
                DriftOperator.from_expressions(self.drift_components)
            except (SymbolSyntaxError, ValidationError) as exc:
                raise ValueError(f"custom drift rejected: {exc}") from exc
        elif self.drift == "sqg" and self.n != 2:
            raise ValueError("the sqg drift needs n = 2")
        if self.beta is not None and not self.beta < self.alpha:
            raise ValueError(f"beta={self.beta} must be smaller than alpha={self.alpha}")
        return self

    def grid(self) -> Grid:
        return Grid(n=self.n, points=self.N, side=self.L)

    def drift_operator(self) -> DriftOperator:
        if self.drift == "sqg":
            return DriftOperator.sqg()
        if self.drift == "zero":
            return DriftOperator.zero(self.n)
        return DriftOperator.from_expressions(self.drift_components)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            alpha=self.alpha,
            p=self.p,
            max_iters=self.max_iters,
            tol=self.tol,
            dealiased=self.dealiased,
            enforce_gate=self.enforce_gate,
            trials=self.trials,
        )

    def toy_config(self) -> ToyConfig:
        if self.beta is None:
            raise ConfigError("beta", "the toy model needs beta")
        return ToyConfig(
            alpha=self.alpha,
            beta=self.beta,
            p=self.p,
            max_iters=self.max_iters,
            tol=self.tol,
            dealiased=self.dealiased,
        )

    def canonical(self) -> dict[str, Any]:
        """Configuration echo used in reports; ``output_dir`` does not affect results."""
        return self.model_dump(mode="json", exclude={"output_dir"})

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.canonical(), sort_keys=True).encode()).hexdigest()


def _suggest(key: str) -> list[str]:
    valid = [name for name in RunConfig.model_fields if name != "drift_components"] + ["drift.1", "drift.2", "drift.3"]
    return [match for match, score in process.extract(key, valid, limit=5) if score > 50]


def parse_run_config(text: str) -> RunConfig:
    """
    Parse and validate the text of a config file.

    Raises:
        ConfigError: For malformed lines, unknown or repeated keys and invalid values
    """
    values: dict[str, Any] = {}
    components: dict[int, str] = {}
    for line in text.splitlines():
        entry = parse_line(line)
        if entry is None:
            continue
        key, raw = entry
        component = _DRIFT_COMPONENT.match(key)
        if component:
            components[int(component.group(1))] = raw
            continue
        if key not in RunConfig.model_fields or key == "drift_components":
            raise ConfigError(key, "unknown key", _suggest(key))
        if key in values:
            raise ConfigError(key, "given more than once")
        values[key] = _convert(key, raw)
    if components:
        values.setdefault("drift", "custom")
        values["drift_components"] = [components[j] for j in sorted(components)]
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        location = ".".join(str(part) for part in error["loc"]) or "config"
        raise ConfigError(location, error["msg"]) from exc


def _convert(key: str, raw: str) -> Any:
    annotation = RunConfig.model_fields[key].annotation
    try:
        if annotation is bool:
            return parse_bool(raw)
        if annotation in (int, float, Optional[int], Optional[float]):
            return parse_number(raw)
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from exc
    return raw


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    return parse_run_config(text)
