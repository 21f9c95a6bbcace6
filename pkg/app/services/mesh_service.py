# backend/app/services/mesh_service.py
# Lagrange-Laguerre meshes, operator matrices and mesh quadrature

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from app.exceptions import ContractViolationError, MeshConvergenceError
from app.models.mesh import Mesh, MeshSpec, OperatorMatrices
from app.utils.constants import (
    MAX_NEWTON_ITERATIONS,
    NEWTON_TOLERANCE,
    RECURRENCE_RESCALE_LIMIT,
    ROOT_DISTINCTNESS,
    MeshFamily,
)
from app.utils.validators import validate_normalized

logger = logging.getLogger(__name__)


def _laguerre_recurrence(
    x: np.ndarray, n: int, alpha: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return rescaled L_n^alpha(x), L_{n-1}^alpha(x) and the log of the common scale."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    log_scale = np.zeros_like(x)
    if n == 0:
        return prev, np.zeros_like(x), log_scale
    curr = 1.0 + alpha - x
    for k in range(1, n):
        prev, curr = curr, ((2 * k + 1 + alpha - x) * curr - (k + alpha) * prev) / (k + 1)
        large = np.abs(curr) > RECURRENCE_RESCALE_LIMIT
        if np.any(large):
            factor = np.where(large, np.abs(curr), 1.0)
            curr = curr / factor
            prev = prev / factor
            log_scale = log_scale + np.log(factor)
    return curr, prev, log_scale


def _derivative_numerator(p_n: np.ndarray, p_prev: np.ndarray, n: int, alpha: float) -> np.ndarray:
    # x L_n'(x) = n L_n(x) - (n + alpha) L_{n-1}(x)
    return n * p_n - (n + alpha) * p_prev


def _refine_roots(roots: np.ndarray, spec: MeshSpec) -> np.ndarray:
    n, alpha = spec.size, spec.alpha
    for _ in range(MAX_NEWTON_ITERATIONS):
        p_n, p_prev, _ = _laguerre_recurrence(roots, n, alpha)
        step = roots * p_n / _derivative_numerator(p_n, p_prev, n, alpha)
        roots = roots - step
        relative = np.abs(step) / roots
        if np.all(relative <= NEWTON_TOLERANCE):
            return roots
    index = int(np.argmax(relative))
    logger.error(f"Newton refinement stalled at root {index} for {spec}")
    raise MeshConvergenceError(index, spec.family.value, n)


@lru_cache(maxsize=64)
def build_mesh(spec: MeshSpec) -> Mesh:
    """Build the mesh points, Gauss weights and Lagrange weights for a spec."""
    n, alpha = spec.size, spec.alpha
    if n == 1:
        roots = np.array([1.0 + alpha])
    else:
        k = np.arange(n, dtype=float)
        diagonal = 2.0 * k + alpha + 1.0
        off_diagonal = np.sqrt(k[1:] * (k[1:] + alpha))
        roots = eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True)
        roots = _refine_roots(np.sort(roots), spec)

    if roots[0] <= 0 or np.any(np.diff(roots) <= ROOT_DISTINCTNESS * roots[1:]):
        index = int(np.argmin(np.diff(roots))) if n > 1 else 0
        raise MeshConvergenceError(index, spec.family.value, n)

    p_n, p_prev, log_scale = _laguerre_recurrence(roots, n, alpha)
    derivative = _derivative_numerator(p_n, p_prev, n, alpha)
    # w_i = Gamma(n+alpha+1) / (n! x_i L_n'(x_i)^2), in logs to survive large n
    log_weights = (
        gammaln(n + alpha + 1)
        - gammaln(n + 1)
        + np.log(roots)
        - 2.0 * np.log(np.abs(derivative))
        - 2.0 * log_scale
    )
    weights = np.exp(log_weights)
    lagrange_weights = np.exp(log_weights + roots - alpha * np.log(roots))

    for array in (roots, weights, lagrange_weights):
        array.flags.writeable = False
    logger.debug(f"Built {spec.family.value} mesh N={n} alpha={alpha}, x_N={roots[-1]:.3f}")
    return Mesh(spec=spec, points=roots, weights=weights, lagrange_weights=lagrange_weights)


def kinetic_matrix(mesh: Mesh) -> np.ndarray:
    """Kinetic matrix in the Lagrange basis at scale h (closed form, Gauss approximated)."""
    x = mesh.points
    n, alpha, h = mesh.spec.size, mesh.spec.alpha, mesh.spec.h
    index = np.arange(n)
    sign = np.where(np.subtract.outer(index, index) % 2 == 0, 1.0, -1.0)
    xi = x[:, None]
    xj = x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        if mesh.spec.family == MeshFamily.LAGUERRE:
            T = sign * (xi + xj) / (2.0 * np.sqrt(xi * xj) * (xi - xj) ** 2)
            diagonal = (4.0 + (4.0 * n + 2.0) * x - x**2) / (24.0 * x**2)
        else:
            T = (
                sign
                / np.sqrt(xi * xj)
                * (n / (alpha + 1.0) + 0.5 - (1.0 / xi + 1.0 / xj) + (xi + xj) / (xi - xj) ** 2)
            )
            diagonal = (
                -1.0 / 12.0
                + (2.0 * n + alpha + 1.0) * (alpha + 4.0) / (6.0 * (alpha + 1.0) * x)
                + (alpha + 2.0) * (alpha - 5.0) / (6.0 * x**2)
            )
    T[np.diag_indices(n)] = diagonal
    T = np.triu(T) + np.triu(T, 1).T
    return T / h**2


def potential_vector(mesh: Mesh, v0: float, nu: int) -> np.ndarray:
    """Gaussian well plus centrifugal term evaluated at the scaled mesh points."""
    if nu < 2:
        raise ContractViolationError(f"nu must be at least 2, got {nu}")
    r = mesh.scaled_points
    return -v0 * np.exp(-(r**2)) + (nu - 1) * (nu - 3) / (8.0 * r**2)


def operator_matrices(mesh: Mesh, v0: float, nu: int) -> OperatorMatrices:
    """Assemble T, U and the family-specific pieces of the Hamiltonian."""
    T = kinetic_matrix(mesh)
    U = potential_vector(mesh, v0, nu)
    if mesh.spec.family == MeshFamily.LAGUERRE:
        return OperatorMatrices(
            T=T, U=U, nu=nu, kinetic_factor=1.0, regularization=np.zeros_like(U)
        )
    # The generalized closed form carries -d^2 + alpha(alpha-2)/(4 r^2); remove the extra term
    alpha = mesh.spec.alpha
    regularization = alpha * (alpha - 2.0) / (8.0 * mesh.scaled_points**2)
    return OperatorMatrices(
        T=T, U=U, nu=nu, kinetic_factor=0.5, regularization=regularization
    )


def mesh_expectation(
    coefficients: np.ndarray, g: Callable[[np.ndarray], np.ndarray], mesh: Mesh
) -> float:
    """Expectation <g(r)> = sum_i c_i^2 g(h x_i) of a normalized mesh state."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (mesh.spec.size,):
        raise ContractViolationError(
            f"Expected {mesh.spec.size} coefficients, got shape {coefficients.shape}"
        )
    if not validate_normalized(coefficients):
        raise ContractViolationError("Mesh coefficients must be normalized to 1")
    values = np.broadcast_to(np.asarray(g(mesh.scaled_points), dtype=float), coefficients.shape)
    return float(np.sum(coefficients**2 * values))


def lagrange_functions(mesh: Mesh, r: np.ndarray) -> np.ndarray:
    """Regularized Lagrange functions at radii r; row i is the function of mesh point i."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise ContractViolationError("Lagrange functions are evaluated at r > 0 only")
    n, alpha, h = mesh.spec.size, mesh.spec.alpha, mesh.spec.h
    nodes = mesh.points
    x = r / h

    p_n, p_prev, log_scale = _laguerre_recurrence(x, n, alpha)
    derivative = _derivative_numerator(p_n, p_prev, n, alpha) / x
    offset = x[None, :] - nodes[:, None]
    coincident = np.abs(offset) <= 1e-13 * nodes[:, None]
    ratio = np.where(
        coincident,
        derivative[None, :],
        p_n[None, :] / np.where(coincident, 1.0, offset),
    )

    if mesh.spec.family == MeshFamily.LAGUERRE:
        log_envelope = log_scale + np.log(x) - 0.5 * x
        node_factor = nodes**-0.5
    else:
        log_norm = 0.5 * (gammaln(n + alpha + 1) - gammaln(n + 1))
        log_envelope = log_scale + 0.5 * alpha * np.log(x) - 0.5 * x - log_norm
        node_factor = nodes**0.5

    signs = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
    values = (signs * node_factor)[:, None] * ratio * np.exp(log_envelope)[None, :]
    return values / np.sqrt(h)
