# backend/app/models/critical.py
# Models for critical-depth queries, extrapolation fits and threshold coefficients

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.utils.constants import (
    CRITICAL_TOLERANCE_L,
    CRITICAL_TOLERANCE_S,
    EXTRAPOLATION_MESH_SIZES,
    H_GRID_POINTS,
    H_GRID_RATIO,
    PRINCIPAL_LABEL_SHIFT,
    ThresholdKind,
)
from app.utils.validators import validate_h_grid, validate_mesh_size, validate_well_dimensions


def default_h_grid() -> List[float]:
    return [H_GRID_RATIO**i for i in range(H_GRID_POINTS)]


class CriticalQuery(BaseModel):
    """State (d, n, ell) whose binding threshold is sought, with mesh settings."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(3, ge=1)
    n: int = Field(..., ge=1)
    ell: int = Field(0, ge=0)
    mesh_sizes: Tuple[int, ...] = EXTRAPOLATION_MESH_SIZES
    h_grid: Tuple[float, ...] = Field(default_factory=lambda: tuple(default_h_grid()))
    tolerance: Optional[float] = Field(None, gt=0, le=1e-6)
    bracket: Optional[Tuple[float, float]] = None

    @field_validator("mesh_sizes")
    def check_mesh_sizes(cls, v):
        if not v or not all(validate_mesh_size(size) for size in v):
            raise ValueError("mesh_sizes must be a non-empty list of valid mesh sizes")
        return tuple(sorted(v))

    @field_validator("h_grid")
    def check_h_grid(cls, v):
        if not validate_h_grid(v):
            raise ValueError("h_grid must be positive and strictly increasing")
        return tuple(v)

    @model_validator(mode="after")
    def check_state(self):
        if not validate_well_dimensions(self.d, self.ell):
            raise ValueError("nu = 2*ell + d must be at least 2")
        if self.k < 1:
            raise ValueError(f"No state labelled n={self.n} for ell={self.ell}")
        if self.bracket is not None and not 0 <= self.bracket[0] < self.bracket[1]:
            raise ValueError("bracket must satisfy 0 <= low < high")
        return self

    @property
    def k(self) -> int:
        return self.n - PRINCIPAL_LABEL_SHIFT.get(self.d, 1) * self.ell

    @property
    def resolved_tolerance(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return CRITICAL_TOLERANCE_S if self.ell == 0 else CRITICAL_TOLERANCE_L

    @property
    def label(self) -> str:
        return f"d={self.d} (n={self.n}, l={self.ell})"


@dataclass(frozen=True)
class CriticalFit:
    """Fit v0_c(h) = sum_n beta_n h^(-n tau) for one mesh size."""

    beta: Tuple[float, float, float, float]
    tau: float
    residual: float
    mesh_size: int
    samples: Tuple[Tuple[float, float], ...]
    flagged: bool
    beta0_by_mesh: Dict[int, float] = field(default_factory=dict)
    significant_digits: Optional[int] = None

    @property
    def v0_critical(self) -> float:
        return self.beta[0]

    def evaluate(self, h: float) -> float:
        return sum(b * h ** (-i * self.tau) for i, b in enumerate(self.beta))


@dataclass(frozen=True)
class ThresholdCoefficients:
    """Coefficients of the near-threshold expansion of E(v0)."""

    kind: ThresholdKind
    values: Dict[str, float]
    v0_c: float
    window: Tuple[float, float]
    residual: float
    alternate_residual: Optional[float] = None
    alternate_values: Optional[Dict[str, float]] = None
    leading_negative: bool = True
