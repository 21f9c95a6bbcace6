# backend/app/models/ansatz.py
# Models for the variational Ansatz and its quadrature

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.models.well import WellSpec
from app.utils.validators import validate_ansatz_parameters


class AnsatzConfig(BaseModel):
    """Parameters chi = (a, b, s) of phi(r) = (a + b r^2)/sqrt(1 + r^2) + s log(1 + r^2)."""

    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    s: float

    @model_validator(mode="after")
    def check_normalizable(self):
        if not validate_ansatz_parameters(self.a, self.b, self.s):
            raise ValueError(
                f"Ansatz parameters must satisfy b >= 0 and b + s > 0 (got b={self.b}, s={self.s})"
            )
        return self

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.a, self.b, self.s)


@dataclass(frozen=True)
class QuadratureRule:
    """Radial nodes with weights that already include the measure r^(d-1)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    decay: float
    split: float


@dataclass(frozen=True)
class SuperpositionState:
    """Optimized superposition of K Ansatz terms."""

    configs: Tuple[AnsatzConfig, ...]
    linear_coeffs: np.ndarray
    well: WellSpec
    energy: float
    level: int = 0
    argument_scale: float = 1.0
    quadrature_order: int = 0
    flagged: bool = False

    @property
    def terms(self) -> int:
        return len(self.configs)
