# backend/app/services/spectrum_service.py
# Bound-state spectra of Gaussian wells on Lagrange meshes

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh

from app.exceptions import ContractViolationError, EigensolverError, NumericalInconsistencyError
from app.models.mesh import MeshSpec
from app.models.well import BoundState, Spectrum, WellSpec
from app.services.mesh_service import (
    build_mesh,
    lagrange_functions,
    mesh_expectation,
    operator_matrices,
)
from app.utils.constants import (
    DEFAULT_MESH_SIZE,
    DEFAULT_SCALING,
    GENERALIZED_ALPHA,
    VARIANCE_CLAMP,
    MeshFamily,
)

logger = logging.getLogger(__name__)


def mesh_family_for(well: WellSpec) -> MeshFamily:
    """2D s-waves need the generalized mesh; everything else uses the Laguerre mesh."""
    if well.d == 2 and well.ell == 0:
        return MeshFamily.GENERALIZED_LAGUERRE
    return MeshFamily.LAGUERRE


def resolve_mesh_spec(
    well: WellSpec, mesh_spec: Optional[MeshSpec] = None
) -> MeshSpec:
    """Return a mesh spec whose family matches the well."""
    if mesh_spec is None:
        mesh_spec = MeshSpec(size=DEFAULT_MESH_SIZE, h=DEFAULT_SCALING)
    family = mesh_family_for(well)
    if mesh_spec.family == family:
        return mesh_spec
    alpha = GENERALIZED_ALPHA if family == MeshFamily.GENERALIZED_LAGUERRE else 0.0
    logger.debug(f"Routing d={well.d} l={well.ell} to the {family.value} mesh")
    return MeshSpec(family=family, size=mesh_spec.size, h=mesh_spec.h, alpha=alpha)


def hamiltonian(well: WellSpec, mesh_spec: MeshSpec) -> np.ndarray:
    mesh = build_mesh(mesh_spec)
    return operator_matrices(mesh, well.v0, well.nu).hamiltonian()


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(vector)))
    return vector if vector[pivot] >= 0 else -vector


def solve_well(well: WellSpec, mesh_spec: Optional[MeshSpec] = None) -> Spectrum:
    """All bound states (negative eigenvalues) of the well, in ascending energy."""
    mesh_spec = resolve_mesh_spec(well, mesh_spec)
    H = hamiltonian(well, mesh_spec)
    try:
        energies, vectors = eigh(H)
    except (LinAlgError, ValueError) as e:
        logger.error(f"Eigensolver failed for {well} on {mesh_spec}: {str(e)}")
        raise EigensolverError(mesh_spec, str(e))

    states = []
    for index in np.flatnonzero(energies < 0):
        k = int(index) + 1
        n, ell = well.label(k)
        states.append(
            BoundState(
                n=n,
                ell=ell,
                k=k,
                energy=float(energies[index]),
                coefficients=_fix_sign(vectors[:, index]),
                mesh_spec=mesh_spec,
            )
        )
    logger.info(
        f"Solved v0={well.v0} d={well.d} l={well.ell} on N={mesh_spec.size} h={mesh_spec.h}: "
        f"{len(states)} bound state(s)"
    )
    return Spectrum(well=well, mesh_spec=mesh_spec, states=tuple(states))


def level_energy(well: WellSpec, mesh_spec: MeshSpec, k: int) -> float:
    """k-th eigenvalue (k counted from 1), bound or not."""
    mesh_spec = resolve_mesh_spec(well, mesh_spec)
    if not 1 <= k <= mesh_spec.size:
        raise ContractViolationError(f"Level index k={k} outside 1..{mesh_spec.size}")
    H = hamiltonian(well, mesh_spec)
    try:
        values = eigh(H, eigvals_only=True, subset_by_index=[k - 1, k - 1])
    except (LinAlgError, ValueError) as e:
        logger.error(f"Eigensolver failed for {well} on {mesh_spec}: {str(e)}")
        raise EigensolverError(mesh_spec, str(e))
    return float(values[0])


def radial_moments(state: BoundState) -> Tuple[float, float]:
    """Mean radius and its standard deviation."""
    mesh = build_mesh(state.mesh_spec)
    mean_r = mesh_expectation(state.coefficients, lambda r: r, mesh)
    mean_r2 = mesh_expectation(state.coefficients, lambda r: r**2, mesh)
    variance = mean_r2 - mean_r**2
    if variance < -VARIANCE_CLAMP * max(1.0, mean_r2):
        raise NumericalInconsistencyError(
            f"Negative variance {variance:.3e} for state (n={state.n}, l={state.ell})"
        )
    return mean_r, math.sqrt(max(variance, 0.0))


def degeneracy_check(
    d: int, ell: int, d_prime: int, ell_prime: int, v0: float,
    mesh_spec: Optional[MeshSpec] = None,
) -> float:
    """Largest energy difference between matched levels of the (d, ell) and (d', ell') wells."""
    first = WellSpec(v0=v0, d=d, ell=ell)
    second = WellSpec(v0=v0, d=d_prime, ell=ell_prime)
    if first.nu != second.nu:
        raise ContractViolationError(
            f"Wells do not share nu: {first.nu} (d={first.d}, l={first.ell}) vs "
            f"{second.nu} (d={second.d}, l={second.ell})"
        )
    first_levels = [s.energy for s in solve_well(first, mesh_spec).states]
    second_levels = [s.energy for s in solve_well(second, mesh_spec).states]
    matched = min(len(first_levels), len(second_levels))
    if matched == 0:
        return 0.0
    return float(
        max(abs(a - b) for a, b in zip(first_levels[:matched], second_levels[:matched]))
    )


def wavefunction(state: BoundState, r: np.ndarray) -> np.ndarray:
    """Reduced radial wave function u(r) = sum_i c_i f_i(r)."""
    mesh = build_mesh(state.mesh_spec)
    return state.coefficients @ lagrange_functions(mesh, r)


def scaled_energy(
    depth: float, width: float, hbar2_over_m: float, d: int, ell: int, n: int,
    mesh_spec: Optional[MeshSpec] = None,
) -> Optional[float]:
    """Physical energy of -(hbar^2/2m) lap - V0 exp(-lambda r^2) from the dimensionless well."""
    if width <= 0 or hbar2_over_m <= 0:
        raise ContractViolationError("width and hbar^2/m must be positive")
    unit = hbar2_over_m * width
    well = WellSpec(v0=depth / unit, d=d, ell=ell)
    state = solve_well(well, mesh_spec).state(n, ell)
    if state is None:
        return None
    return unit * state.energy
