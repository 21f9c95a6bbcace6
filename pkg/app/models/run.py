# backend/app/models/run.py
# Run configuration and manifest for the command-line front end

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.utils.constants import (
    ARTIFACT_VERSION,
    DEFAULT_MESH_SIZE,
    DEFAULT_RESTARTS,
    DEFAULT_SCALING,
    DEFAULT_SEED,
    MAX_MESH_SIZE,
    Command,
    OutputFormat,
    SpinChannel,
    TableId,
)
from app.utils.settings import OUTPUT_DIR
from app.utils.validators import validate_h_grid, validate_threshold_window

_REQUIRED = {
    Command.SOLVE: ("v0",),
    Command.CRITICAL: ("n",),
    Command.THRESHOLD_FIT: ("n",),
    Command.ANSATZ: ("v0",),
    Command.DEUTERON: ("cutoff",),
    Command.QDOT: ("width", "depth"),
    Command.REPRODUCE: ("table",),
}


class RunConfig(BaseModel):
    """Validated configuration for one CLI invocation; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command
    output_dir: str = OUTPUT_DIR
    format: OutputFormat = OutputFormat.CSV
    seed: int = DEFAULT_SEED
    workers: Optional[int] = Field(None, ge=1)
    store: Optional[str] = None

    # mesh and well
    nmesh: int = Field(DEFAULT_MESH_SIZE, ge=1, le=MAX_MESH_SIZE)
    h: float = Field(DEFAULT_SCALING, gt=0)
    dim: int = Field(3, ge=1)
    ell: int = Field(0, ge=0)
    n: Optional[int] = Field(None, ge=1)
    v0: Optional[float] = Field(None, ge=0)

    # critical depths and threshold fits
    extrapolate: bool = False
    mesh_sizes: Optional[List[int]] = None
    h_grid: Optional[List[float]] = None
    v0_c: Optional[float] = Field(None, ge=0)
    window: Optional[Tuple[float, float]] = None
    samples: int = Field(30, ge=3)

    # Ansatz
    terms: int = Field(1, ge=1, le=6)
    restarts: int = Field(DEFAULT_RESTARTS, ge=1)
    level: int = Field(0, ge=0)

    # deuteron
    cutoff: Optional[float] = Field(None, gt=0)
    c1: Optional[float] = None
    c2: Optional[float] = None
    channel: SpinChannel = SpinChannel.TRIPLET

    # quantum dot
    width: Optional[float] = Field(None, gt=0)
    depth: Optional[float] = Field(None, gt=0)
    symmetric: bool = False

    table: Optional[TableId] = None

    @field_validator("h_grid")
    def check_h_grid(cls, v):
        if v is not None and not validate_h_grid(v):
            raise ValueError("h_grid must be positive and strictly increasing")
        return v

    @field_validator("window")
    def check_window(cls, v):
        if v is not None and not validate_threshold_window(v):
            raise ValueError("window must satisfy 0 < low < high")
        return v

    @model_validator(mode="after")
    def check_required(self):
        missing = [name for name in _REQUIRED[self.command] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"'{self.command.value}' requires: {', '.join(missing)}")
        if self.level >= self.terms:
            raise ValueError("level must be smaller than terms")
        return self


class RunManifest(BaseModel):
    """Everything needed to audit a run: config, version, timings and output digests."""

    version: str = ARTIFACT_VERSION
    command: Command
    config: Dict
    timings: Dict[str, float] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    status: str = "ok"
