# backend/app/models/well.py
# Models for Gaussian wells, bound states and spectra

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.mesh import MeshSpec
from app.utils.constants import PRINCIPAL_LABEL_SHIFT
from app.utils.validators import validate_well_dimensions


class WellSpec(BaseModel):
    """Gaussian well -v0 exp(-r^2) in d dimensions for angular momentum ell."""

    model_config = ConfigDict(frozen=True)

    v0: float = Field(..., ge=0, description="Dimensionless well depth")
    d: int = Field(3, ge=1, description="Spatial dimension")
    ell: int = Field(0, ge=0, description="Angular momentum quantum number")

    @model_validator(mode="after")
    def check_nu(self):
        if not validate_well_dimensions(self.d, self.ell):
            raise ValueError(f"nu = 2*ell + d must be at least 2 (d={self.d}, ell={self.ell})")
        return self

    @property
    def nu(self) -> int:
        return 2 * self.ell + self.d

    def label(self, k: int) -> Tuple[int, int]:
        """Return the (n, ell) label of the k-th level (k counted from 1)."""
        return k + PRINCIPAL_LABEL_SHIFT.get(self.d, 1) * self.ell, self.ell

    def radial_index(self, n: int) -> int:
        return n - PRINCIPAL_LABEL_SHIFT.get(self.d, 1) * self.ell


@dataclass(frozen=True)
class BoundState:
    """One negative eigenvalue with its mesh coefficients."""

    n: int
    ell: int
    k: int
    energy: float
    coefficients: np.ndarray
    mesh_spec: MeshSpec


@dataclass(frozen=True)
class Spectrum:
    well: WellSpec
    mesh_spec: MeshSpec
    states: Tuple[BoundState, ...]

    def state(self, n: int, ell: Optional[int] = None) -> Optional[BoundState]:
        """Look up a bound state by its (n, ell) label."""
        ell = self.well.ell if ell is None else ell
        for bound_state in self.states:
            if bound_state.n == n and bound_state.ell == ell:
                return bound_state
        return None
