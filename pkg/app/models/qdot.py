# backend/app/models/qdot.py
# Models for the two-electron Gaussian quantum dot

import math
from dataclasses import dataclass
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.ansatz import AnsatzConfig
from app.utils.constants import V0_CRITICAL_3D_GROUND


class QDotModel(BaseModel):
    """Dot of depth V0 and width parameter lambda; rescaled depth v0 = V0 / lambda."""

    model_config = ConfigDict(frozen=True)

    width: float = Field(..., gt=0, description="lambda, the confinement parameter")
    depth: float = Field(..., gt=0, description="V0 in atomic units")

    @model_validator(mode="after")
    def check_bound(self):
        if self.v0 <= V0_CRITICAL_3D_GROUND:
            raise ValueError(
                f"v0 = V0/lambda = {self.v0:.6f} does not bind a one-electron ground state"
            )
        return self

    @property
    def v0(self) -> float:
        return self.depth / self.width

    @property
    def coulomb_scale(self) -> float:
        """Coefficient of 1/r12 in the rescaled Hamiltonian."""
        return 1.0 / math.sqrt(self.width)


class QDotTrial(BaseModel):
    """Frozen orbital chi0, orbital scales alpha/beta and Jastrow parameters."""

    model_config = ConfigDict(frozen=True)

    chi0: AnsatzConfig
    alpha: float = Field(..., gt=0)
    beta: float = Field(..., gt=0)
    gamma: float
    delta1: float
    delta2: float = Field(..., ge=0)

    @property
    def c(self) -> float:
        """Linear correlation coefficient fixed by the electron-electron cusp."""
        return 0.5 - self.gamma

    def as_vector(self) -> Tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta1, self.delta2)


@dataclass(frozen=True)
class QDotResult:
    model: QDotModel
    trial: QDotTrial
    energy: float
    scaled_energy: float
    inv_r12: float
    inv_r12_scaled: float
    radial_order: int
    angular_order: int
    flagged: bool = False
