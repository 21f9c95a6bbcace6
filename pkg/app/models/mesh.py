# backend/app/models/mesh.py
# Models for Lagrange meshes and their operator matrices

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.utils.constants import DEFAULT_SCALING, MAX_MESH_SIZE, MeshFamily
from app.utils.validators import validate_scaling


class MeshSpec(BaseModel):
    """Mesh family, size N, scaling h and (generalized family only) alpha."""

    model_config = ConfigDict(frozen=True)

    family: MeshFamily = MeshFamily.LAGUERRE
    size: int = Field(..., ge=1, le=MAX_MESH_SIZE, description="Number of mesh points N")
    h: float = Field(DEFAULT_SCALING, gt=0, description="Scaling factor r = h * x")
    alpha: float = Field(0.0, ge=0, description="Generalized Laguerre parameter")

    @model_validator(mode="after")
    def check_parameters(self):
        if not validate_scaling(self.h):
            raise ValueError(f"h must be finite and positive, got {self.h}")
        if self.family == MeshFamily.LAGUERRE and self.alpha != 0.0:
            raise ValueError("alpha is only meaningful for the generalized Laguerre family")
        if self.family == MeshFamily.GENERALIZED_LAGUERRE and self.alpha <= 0.0:
            raise ValueError("generalized Laguerre mesh requires alpha > 0")
        return self


@dataclass(frozen=True)
class Mesh:
    """Zeros x_i of L_N^alpha with Gauss weights and Lagrange weights."""

    spec: MeshSpec
    points: np.ndarray
    weights: np.ndarray
    lagrange_weights: np.ndarray

    @property
    def scaled_points(self) -> np.ndarray:
        return self.spec.h * self.points


@dataclass(frozen=True)
class OperatorMatrices:
    """Kinetic matrix T, diagonal potential U and the pieces needed to assemble H."""

    T: np.ndarray
    U: np.ndarray
    nu: int
    kinetic_factor: float
    regularization: np.ndarray

    def hamiltonian(self) -> np.ndarray:
        H = self.kinetic_factor * self.T
        H[np.diag_indices_from(H)] += self.U - self.regularization
        return H
