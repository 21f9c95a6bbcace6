# backend/app/models/deuteron.py
# Models for the leading-order deuteron

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.utils.constants import HBAR2_OVER_MU, DeuteronMethod, SpinChannel


class DeuteronModel(BaseModel):
    """Contact couplings C1, C2 (MeV) regularized with a Gaussian of cutoff Lambda (fm^-1)."""

    model_config = ConfigDict(frozen=True)

    cutoff: float = Field(..., gt=0, description="Regulator cutoff Lambda in fm^-1")
    c1: float
    c2: float
    hbar2_over_mu: float = Field(HBAR2_OVER_MU, gt=0, description="hbar^2 / mu in MeV fm^2")
    channel: SpinChannel = SpinChannel.TRIPLET

    @model_validator(mode="after")
    def check_attractive(self):
        if self.coupling >= 0:
            raise ValueError(
                f"{self.channel.value} coupling must be attractive (got {self.coupling})"
            )
        return self

    @property
    def coupling(self) -> float:
        """C1 + C2 in the triplet channel, C1 - 3 C2 in the singlet."""
        if self.channel == SpinChannel.SINGLET:
            return self.c1 - 3.0 * self.c2
        return self.c1 + self.c2


@dataclass(frozen=True)
class DeuteronResult:
    method: DeuteronMethod
    cutoff: float
    v0: float
    energy_scale: float
    energy: Optional[float]
    bound: bool
    terms: Optional[int] = None
    parameters: List[Tuple[float, float, float]] = field(default_factory=list)
