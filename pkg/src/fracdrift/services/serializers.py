"""Persistence of fields (FRQS binary dumps), reports (JSON) and series (CSV)."""

import logging
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, SerializeAsAny

from ..models.fields import Grid, RealField
from ..models.reports import RunMetadata, SolveReport, Trajectory
from .spectral_core import FracDriftError

logger = logging.getLogger(__name__)

FRQS_MAGIC = b"FRQS"
FRQS_VERSION = 1
FRQS_HEADER = np.dtype(
    [("magic", "S4"), ("version", "<u4"), ("n", "<u4"), ("N", "<u4"), ("L", "<f8")]
)

PathLike = Union[str, Path]


class FrqsFormatError(FracDriftError):
    """Raised when a byte string is not a valid FRQS field dump."""


class ReportDocument(BaseModel):
    """JSON envelope: run metadata, the configuration echo and the report itself."""

    metadata: RunMetadata
    config: dict[str, Any] = Field(default_factory=dict)
    report: SerializeAsAny[BaseModel]


def field_to_bytes(f: RealField) -> bytes:
    """
    Encode ``f`` as an FRQS dump: 24-byte header then N^n little-endian f8 samples.

    Example:
        >>> data = field_to_bytes(RealField.zeros(Grid(n=1, points=8)))
        >>> data[:4], len(data)
        (b'FRQS', 88)
    """
    header = np.zeros((), dtype=FRQS_HEADER)
    header["magic"] = FRQS_MAGIC
    header["version"] = FRQS_VERSION
    header["n"] = f.grid.n
    header["N"] = f.grid.points
    header["L"] = f.grid.side
    return header.tobytes() + np.ascontiguousarray(f.samples, dtype="<f8").tobytes()


def field_from_bytes(data: bytes) -> RealField:
    """
    Decode an FRQS dump.

    Raises:
        FrqsFormatError: On a bad magic, unknown version or size mismatch
    """
    if len(data) < FRQS_HEADER.itemsize:
        raise FrqsFormatError(f"dump of {len(data)} bytes is shorter than the header")
    header = np.frombuffer(data, dtype=FRQS_HEADER, count=1)[0]
    if bytes(header["magic"]) != FRQS_MAGIC:
        raise FrqsFormatError(f"bad magic {bytes(header['magic'])!r}")
    if int(header["version"]) != FRQS_VERSION:
        raise FrqsFormatError(f"unsupported version {int(header['version'])}")
    grid = Grid(n=int(header["n"]), points=int(header["N"]), side=float(header["L"]))
    payload = data[FRQS_HEADER.itemsize :]
    if len(payload) != 8 * grid.size:
        raise FrqsFormatError(f"expected {8 * grid.size} payload bytes, got {len(payload)}")
    samples = np.frombuffer(payload, dtype="<f8").reshape(grid.shape)
    return RealField(grid=grid, samples=samples)


def write_field(path: PathLike, f: RealField) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(field_to_bytes(f))
    return path


def read_field(path: PathLike) -> RealField:
    return field_from_bytes(Path(path).read_bytes())


def write_report(path: PathLike, report: BaseModel, metadata: RunMetadata, config: dict[str, Any]) -> Path:
    """Write ``report`` inside a ``ReportDocument`` as indented JSON."""
    document = ReportDocument(metadata=metadata, config=config, report=report)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2, by_alias=True) + "\n")
    logger.info("wrote %s", path)
    return path


def iterations_frame(report: SolveReport) -> pd.DataFrame:
    """
    Per-iteration series: iter, lorentz_norm, lp_norm, update, ratio, residual.

    The contraction ratio starts at the second iteration; the residual is
    only evaluated for the final iterate.
    """
    rows = []
    last = len(report.iterates_norms)
    for position, norms in enumerate(report.iterates_norms):
        rows.append(
            {
                "iter": norms.iteration,
                "lorentz_norm": norms.lorentz,
                "lp_norm": norms.lp,
                "update": report.updates[position],
                "ratio": report.contraction_ratios[position - 1]
                if 0 < position <= len(report.contraction_ratios)
                else None,
                "residual": report.residual if position == last - 1 else None,
            }
        )
    return pd.DataFrame(rows, columns=["iter", "lorentz_norm", "lp_norm", "update", "ratio", "residual"])


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Per-step index with columns time, l2, linf, weighted_sup."""
    return pd.DataFrame([step.model_dump() for step in trajectory.steps], columns=["time", "l2", "linf", "weighted_sup"])


def shells_frame(**series: list[float]) -> pd.DataFrame:
    """
    Shell energies in long format with columns field, j, energy.

    Example:
        >>> shells_frame(f=[1.0, 0.5], u=[0.2, 0.1]).shape
        (4, 3)
    """
    rows = [{"field": name, "j": j, "energy": e} for name, energies in series.items() for j, e in enumerate(energies)]
    return pd.DataFrame(rows, columns=["field", "j", "energy"])


def write_csv(path: PathLike, frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


def write_trajectory(directory: PathLike, trajectory: Trajectory) -> list[Path]:
    """Dump every saved state as ``state_XXXXX.frqs`` (XXXXX = step number)."""
    directory = Path(directory)
    paths = []
    for time, state in zip(trajectory.times, trajectory.states):
        step = int(round(time / trajectory.dt)) if trajectory.dt > 0 else 0
        paths.append(write_field(directory / f"state_{step:05d}.frqs", state))
    return paths
