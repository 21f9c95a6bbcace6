# backend/app/services/ansatz_service.py
# Variational Ansatz: radial quadrature, Rayleigh-Ritz energies and Nelder-Mead optimization

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh
from scipy.optimize import minimize
from scipy.special import roots_legendre

from app.exceptions import ContractViolationError, DegenerateSuperpositionError, GaussWellError
from app.models.ansatz import AnsatzConfig, QuadratureRule, SuperpositionState
from app.models.mesh import MeshSpec
from app.models.well import WellSpec
from app.services.mesh_service import build_mesh
from app.services.spectrum_service import solve_well
from app.utils.constants import (
    ANSATZ_START,
    ANSATZ_START_SPREAD,
    CONFIG_DISTINCTNESS,
    DECAY_FALLBACK,
    DECAY_HINT_MESH_SIZE,
    DEFAULT_QUADRATURE_ORDER,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    NELDER_MEAD_FATOL,
    NELDER_MEAD_MAXITER,
    NELDER_MEAD_XATOL,
    OBJECTIVE_PENALTY,
    OVERLAP_CONDITION_LIMIT,
    QUADRATURE_SPLIT,
)
from app.utils.settings import worker_count
from app.utils.validators import validate_ansatz_parameters

logger = logging.getLogger(__name__)


def phi(r: np.ndarray, a: float, b: float, s: float) -> np.ndarray:
    """phi(r) = (a + b r^2)/sqrt(1 + r^2) + s log(1 + r^2)."""
    r2 = r * r
    return (a + b * r2) / np.sqrt(1.0 + r2) + s * np.log1p(r2)


def phi_derivative(r: np.ndarray, a: float, b: float, s: float) -> np.ndarray:
    r2 = r * r
    root = np.sqrt(1.0 + r2)
    return 2.0 * b * r / root - (a + b * r2) * r / root**3 + 2.0 * s * r / (1.0 + r2)


@lru_cache(maxsize=32)
def radial_rule(order: int, decay: float, split: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integrals over [0, inf) of functions decaying like exp(-2 decay r).

    Gauss-Legendre on [0, split] and Gauss-Laguerre on the tail; split = 0 gives a pure
    Gauss-Laguerre rule.
    """
    if order < 2:
        raise ContractViolationError(f"Quadrature order must be at least 2, got {order}")
    rate = 2.0 * max(decay, DECAY_FALLBACK)
    if split > 0:
        inner = order // 2
        x, w = roots_legendre(inner)
        inner_nodes = 0.5 * split * (x + 1.0)
        inner_weights = 0.5 * split * w
    else:
        inner = 0
        inner_nodes = np.empty(0)
        inner_weights = np.empty(0)
    tail = build_mesh(MeshSpec(size=order - inner))
    # Lagrange weights are the Gauss-Laguerre weights times exp(x)
    tail_nodes = split + tail.points / rate
    tail_weights = tail.lagrange_weights / rate
    nodes = np.concatenate([inner_nodes, tail_nodes])
    weights = np.concatenate([inner_weights, tail_weights])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def quadrature_rule(
    well: WellSpec,
    decay: float,
    order: int = DEFAULT_QUADRATURE_ORDER,
    split: float = QUADRATURE_SPLIT,
) -> QuadratureRule:
    nodes, weights = radial_rule(order, float(decay), float(split))
    return QuadratureRule(
        nodes=nodes,
        weights=weights * nodes ** (well.d - 1),
        order=order,
        decay=decay,
        split=split,
    )


def decay_hint(well: WellSpec, level: int = 0) -> float:
    """sqrt(-2E) of the requested level from a small mesh solve, used to place the tail."""
    for h in (1.0, 4.0):
        states = solve_well(well, MeshSpec(size=DECAY_HINT_MESH_SIZE, h=h)).states
        if len(states) > level:
            return math.sqrt(-2.0 * states[level].energy)
    logger.debug(f"No mesh bound state for level {level} of {well}; using fallback decay")
    return DECAY_FALLBACK


def _basis(
    configs: Sequence[Tuple[float, float, float]],
    well: WellSpec,
    r: np.ndarray,
    argument_scale: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Trial functions R_i, their radial derivatives and the log of each row's scale."""
    ell = well.ell
    rows, slopes, shifts = [], [], []
    t = argument_scale * r
    for a, b, s in configs:
        exponent = phi(t, a, b, s)
        shift = float(exponent.min())
        envelope = np.exp(-(exponent - shift))
        derivative = argument_scale * phi_derivative(t, a, b, s)
        power = r**ell
        rows.append(power * envelope)
        if ell == 0:
            slopes.append(-derivative * envelope)
        else:
            slopes.append((ell * r ** (ell - 1) - power * derivative) * envelope)
        shifts.append(shift)
    return np.array(rows), np.array(slopes), np.array(shifts)


def matrix_elements(
    configs: Sequence[Tuple[float, float, float]],
    well: WellSpec,
    rule: QuadratureRule,
    argument_scale: float = 1.0,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hamiltonian and overlap matrices of the trial functions (plus row scales)."""
    r = rule.nodes
    R, dR, shifts = _basis(configs, well, r, argument_scale)
    w = rule.weights
    centrifugal = well.ell * (well.ell + well.d - 2) / (2.0 * r**2)
    potential = centrifugal - well.v0 * np.exp(-(r**2))
    S = (R * w) @ R.T
    H = 0.5 * (dR * w) @ dR.T + (R * (w * potential)) @ R.T
    return 0.5 * (H + H.T), 0.5 * (S + S.T), shifts


def _check_distinct(configs: Sequence[Tuple[float, float, float]]) -> None:
    points = np.array(configs, dtype=float)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if np.max(np.abs(points[i] - points[j])) <= CONFIG_DISTINCTNESS:
                raise ContractViolationError(f"Ansatz terms {i} and {j} coincide")


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(vector)))
    return vector if vector[pivot] >= 0 else -vector


def variational_energy(
    well: WellSpec,
    configs: Sequence[Tuple[float, float, float]],
    rule: Optional[QuadratureRule] = None,
    argument_scale: float = 1.0,
    level: int = 0,
) -> Tuple[float, np.ndarray]:
    """Rayleigh-Ritz energy of the given level and the S-normalized linear coefficients."""
    configs = [tuple(float(v) for v in config) for config in configs]
    if not configs:
        raise ContractViolationError("At least one Ansatz term is required")
    if not 0 <= level < len(configs):
        raise ContractViolationError(f"Level {level} needs at least {level + 1} Ansatz terms")
    for a, b, s in configs:
        if not validate_ansatz_parameters(a, b, s):
            raise ContractViolationError(f"Invalid Ansatz parameters ({a}, {b}, {s})")
    _check_distinct(configs)
    if rule is None:
        rule = quadrature_rule(well, decay_hint(well, level))

    H, S, shifts = matrix_elements(configs, well, rule, argument_scale)
    condition = float(np.linalg.cond(S))
    if not np.isfinite(condition) or condition > OVERLAP_CONDITION_LIMIT:
        raise DegenerateSuperpositionError(condition)
    try:
        energies, vectors = eigh(H, S)
    except (LinAlgError, ValueError) as e:
        logger.debug(f"Generalized eigenproblem failed: {str(e)}")
        raise DegenerateSuperpositionError(condition)
    coefficients = _fix_sign(vectors[:, level])
    # back to the unscaled trial functions
    with np.errstate(over="ignore"):
        coefficients = coefficients * np.exp(shifts)
    return float(energies[level]), coefficients


def _objective(
    flat: np.ndarray,
    well: WellSpec,
    rule: QuadratureRule,
    argument_scale: float,
    level: int,
) -> float:
    configs = [tuple(flat[i : i + 3]) for i in range(0, len(flat), 3)]
    for a, b, s in configs:
        if not validate_ansatz_parameters(a, b, s):
            return OBJECTIVE_PENALTY
    try:
        energy, _ = variational_energy(well, configs, rule, argument_scale, level)
    except GaussWellError:
        return OBJECTIVE_PENALTY
    return energy if np.isfinite(energy) else OBJECTIVE_PENALTY


def _restart_points(
    base: List[Tuple[float, float, float]], restarts: int, seed: int
) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    start = np.array(ANSATZ_START)
    points = []
    for restart in range(restarts):
        if restart == 0:
            new_term = start
        else:
            new_term = start * np.exp(rng.normal(0.0, ANSATZ_START_SPREAD, size=3))
            if base:
                # later terms usually live at larger a
                new_term = new_term * np.array([2.0**restart, 1.0, 1.0])
        points.append(np.concatenate([np.ravel(base), new_term]) if base else new_term)
    return points


def optimize(
    well: WellSpec,
    terms: int = 1,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
    level: int = 0,
    argument_scale: float = 1.0,
    order: int = DEFAULT_QUADRATURE_ORDER,
) -> SuperpositionState:
    """Minimize the Rayleigh-Ritz energy over K Ansatz terms with restarted Nelder-Mead."""
    if terms < 1:
        raise ContractViolationError(f"terms must be at least 1, got {terms}")
    if not 0 <= level < terms:
        raise ContractViolationError(f"Level {level} needs at least {level + 1} Ansatz terms")
    if restarts < 1:
        raise ContractViolationError(f"restarts must be at least 1, got {restarts}")

    base: List[Tuple[float, float, float]] = []
    if terms > 1:
        previous = optimize(
            well, terms - 1, restarts, seed, min(level, terms - 2), argument_scale, order
        )
        base = [config.as_tuple() for config in previous.configs]

    rule = quadrature_rule(well, decay_hint(well, level), order)
    args = (well, rule, argument_scale, level)

    def run(restart: int, x0: np.ndarray):
        if _objective(x0, *args) >= OBJECTIVE_PENALTY:
            logger.debug(f"Restart {restart} starts from an invalid point; skipped")
            return None
        options = {
            "xatol": NELDER_MEAD_XATOL,
            "fatol": NELDER_MEAD_FATOL,
            "maxiter": NELDER_MEAD_MAXITER * len(x0),
            "maxfev": 2 * NELDER_MEAD_MAXITER * len(x0),
            "adaptive": len(x0) > 3,
        }
        result = minimize(_objective, x0, args=args, method="Nelder-Mead", options=options)
        # one polish pass from the converged simplex vertex
        result = minimize(_objective, result.x, args=args, method="Nelder-Mead", options=options)
        logger.debug(f"K={terms} restart {restart}: E={result.fun:.10f} success={result.success}")
        return result

    points = _restart_points(base, restarts, seed)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(run, range(len(points)), points))

    # earliest restart wins ties
    best_energy, best_point, converged = OBJECTIVE_PENALTY, None, False
    for result in results:
        if result is None:
            continue
        if result.fun < best_energy:
            best_energy, best_point = float(result.fun), result.x
        converged = converged or bool(result.success)

    if best_point is None:
        raise ContractViolationError(f"No valid starting point for K={terms} on {well}")

    configs = [tuple(float(v) for v in best_point[i : i + 3]) for i in range(0, len(best_point), 3)]
    energy, coefficients = variational_energy(well, configs, rule, argument_scale, level)
    if not converged:
        logger.warning(f"Nelder-Mead did not report convergence for K={terms} on {well}")
    logger.info(f"Ansatz K={terms} level={level} v0={well.v0}: E={energy:.10f}")
    return SuperpositionState(
        configs=tuple(AnsatzConfig(a=a, b=b, s=s) for a, b, s in configs),
        linear_coeffs=coefficients,
        well=well,
        energy=energy,
        level=level,
        argument_scale=argument_scale,
        quadrature_order=order,
        flagged=not converged,
    )


def trial_radial(
    r: np.ndarray, config: AnsatzConfig, well: WellSpec, argument_scale: float = 1.0
) -> np.ndarray:
    """R(r) = r^ell exp(-phi(scale r; chi)) for a single configuration."""
    r = np.asarray(r, dtype=float)
    return r**well.ell * np.exp(-phi(argument_scale * r, *config.as_tuple()))


def superposition_radial(state: SuperpositionState, r: np.ndarray) -> np.ndarray:
    """sum_i c_i R_i(r) with the state's linear coefficients."""
    r = np.asarray(r, dtype=float)
    total = np.zeros_like(r)
    for coefficient, config in zip(state.linear_coeffs, state.configs):
        total = total + coefficient * trial_radial(r, config, state.well, state.argument_scale)
    return total
