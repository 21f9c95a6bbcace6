# backend/app/services/qdot_service.py
# Two-electron Gaussian quantum dot with a frozen one-body orbital and a Jastrow factor

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import roots_legendre

from app.exceptions import ContractViolationError, GaussWellError
from app.models.ansatz import AnsatzConfig
from app.models.mesh import MeshSpec
from app.models.qdot import QDotModel, QDotResult, QDotTrial
from app.models.well import WellSpec
from app.services.ansatz_service import optimize, phi, phi_derivative
from app.services.mesh_service import build_mesh
from app.utils.constants import (
    DECAY_FALLBACK,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    NELDER_MEAD_FATOL,
    NELDER_MEAD_MAXITER,
    NELDER_MEAD_XATOL,
    OBJECTIVE_PENALTY,
    QDOT_ANGULAR_ORDER,
    QDOT_DENSITY_CUTOFF,
    QDOT_RADIAL_ORDER,
    QDOT_RESTARTS,
    QDOT_STABILITY_LIMIT,
    QDOT_START,
    QDOT_START_SPREAD,
)
from app.utils.settings import worker_count
from app.utils.validators import validate_triangle

logger = logging.getLogger(__name__)


def freeze_orbital(
    model: QDotModel, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED
) -> AnsatzConfig:
    """One-term Ansatz optimum chi0 for the 3D ground state at v0 = V0 / lambda."""
    state = optimize(WellSpec(v0=model.v0, d=3, ell=0), terms=1, restarts=restarts, seed=seed)
    logger.info(f"Frozen orbital for v0={model.v0:.4f}: {state.configs[0].as_tuple()}")
    return state.configs[0]


def _correlation(r12: np.ndarray, trial: QDotTrial) -> Tuple[np.ndarray, np.ndarray]:
    """g(r12) = r12 (1 + d1 r12)/(1 + d2 r12) and its derivative."""
    d1, d2 = trial.delta1, trial.delta2
    denominator = 1.0 + d2 * r12
    g = r12 * (1.0 + d1 * r12) / denominator
    g_prime = (1.0 + 2.0 * d1 * r12 + d1 * d2 * r12**2) / denominator**2
    return g, g_prime


def _log_orbitals(r1: np.ndarray, r2: np.ndarray, trial: QDotTrial) -> np.ndarray:
    a, b, s = trial.chi0.as_tuple()
    return -phi(trial.alpha**2 * r1, a, b, s) - phi(trial.beta**2 * r2, a, b, s)


def trial_value(r1: float, r2: float, r12: float, trial: QDotTrial) -> float:
    """Unnormalized psi(r1, r2, r12)."""
    if not validate_triangle(r1, r2, r12):
        raise ContractViolationError(
            f"(r1, r2, r12) = ({r1}, {r2}, {r12}) violates the triangle inequality"
        )
    g, _ = _correlation(np.asarray(r12, dtype=float), trial)
    log_value = _log_orbitals(np.asarray(r1, dtype=float), np.asarray(r2, dtype=float), trial)
    return float(np.exp(log_value + trial.gamma * g) * (1.0 + trial.c * r12))


def cusp_log_derivative(trial: QDotTrial) -> float:
    """d log psi / d r12 at r12 = 0; the cusp fixes it to 1/2."""
    return trial.c + trial.gamma


def jastrow_growth(gamma: float, delta1: float, delta2: float) -> float:
    """Slope of gamma * g(r12) as r12 grows."""
    if delta2 > 0:
        return gamma * delta1 / delta2
    if delta1 != 0:
        return np.inf if gamma * delta1 > 0 else -np.inf
    return gamma


@lru_cache(maxsize=64)
def _orbital_extent(a: float, b: float, s: float) -> float:
    x = np.concatenate([[0.0], np.geomspace(1e-4, 1e6, 4000)])
    exponent = 2.0 * phi(x, a, b, s)
    lowest = int(np.argmin(exponent))
    beyond = np.flatnonzero(exponent[lowest:] - exponent[lowest] >= QDOT_DENSITY_CUTOFF)
    if beyond.size == 0:
        raise ContractViolationError(f"Orbital ({a}, {b}, {s}) does not decay")
    return float(x[lowest + beyond[0]])


def orbital_extent(chi0: AnsatzConfig) -> float:
    """Argument beyond which exp(-2 phi) has fallen by exp(-QDOT_DENSITY_CUTOFF) from its peak."""
    return _orbital_extent(*chi0.as_tuple())


@lru_cache(maxsize=8)
def _unit_rules(radial_order: int, angular_order: int) -> Tuple[np.ndarray, ...]:
    """Legendre nodes on [0, 1] for the bulk and the ratios, Laguerre nodes for the tail."""
    tail = max(2, radial_order // 5)
    x, w = roots_legendre(radial_order - tail)
    laguerre = build_mesh(MeshSpec(size=tail))
    u, wu = roots_legendre(angular_order)
    return (
        0.5 * (x + 1.0),
        0.5 * w,
        laguerre.points,
        laguerre.lagrange_weights,
        0.5 * (u + 1.0),
        0.5 * wu,
    )


def _grid(trial: QDotTrial, radial_order: int, angular_order: int) -> Dict[str, np.ndarray]:
    """Nodes and volume weights over the (r1, r2, r12) triangle domain.

    Each half r2 < r1 and r1 < r2 is written as (rho, v, t) with rho the larger radius,
    v the ratio of the smaller radius to rho and r12 = rho (1 - v + 2 t v), which keeps
    the integrand smooth across r1 = r2. The bulk of rho sits on the orbital's own scale.
    """
    x, wx, tail_x, tail_w, u, wu = _unit_rules(radial_order, angular_order)
    tightest = min(trial.alpha, trial.beta) ** 2
    end = orbital_extent(trial.chi0) / tightest
    growth = jastrow_growth(trial.gamma, trial.delta1, trial.delta2)
    rate = 2.0 * max(trial.chi0.b * tightest - max(growth, 0.0), DECAY_FALLBACK)
    rho = np.concatenate([end * x, end + tail_x / rate])
    w_rho = np.concatenate([end * wx, tail_w / rate])

    rho3 = rho[:, None, None]
    v = u[None, :, None]
    t = u[None, None, :]
    smaller = rho3 * v
    r12 = rho3 * (1.0 - v + 2.0 * t * v)
    # dr1 dr2 = rho drho dv, dr12 = 2 smaller dt
    weights = w_rho[:, None, None] * wu[None, :, None] * wu[None, None, :]
    volume = weights * rho3 * smaller * r12 * rho3 * 2.0 * smaller

    shape = (rho.size, u.size, u.size)
    larger, smaller, r12, volume = (
        np.broadcast_to(array, shape).ravel() for array in (rho3, smaller, r12, volume)
    )
    return {
        "r1": np.concatenate([larger, smaller]),
        "r2": np.concatenate([smaller, larger]),
        "r12": np.concatenate([r12, r12]),
        "volume": np.concatenate([volume, volume]),
    }


def _integrals(model: QDotModel, trial: QDotTrial, grid: Dict[str, np.ndarray]) -> Dict[str, float]:
    r1, r2, r12, volume = grid["r1"], grid["r2"], grid["r12"], grid["volume"]
    a, b, s = trial.chi0.as_tuple()
    g, g_prime = _correlation(r12, trial)
    log_psi = _log_orbitals(r1, r2, trial) + trial.gamma * g
    log_psi = log_psi - log_psi.max()
    envelope = np.exp(log_psi)
    pair = 1.0 + trial.c * r12
    psi = envelope * pair

    # first derivatives along r1, r2 and r12
    d1 = -trial.alpha**2 * phi_derivative(trial.alpha**2 * r1, a, b, s) * psi
    d2 = -trial.beta**2 * phi_derivative(trial.beta**2 * r2, a, b, s) * psi
    d12 = envelope * (trial.c + pair * trial.gamma * g_prime)

    with np.errstate(divide="ignore", invalid="ignore"):
        cos1 = np.where(r12 > 0, (r1**2 - r2**2 + r12**2) / (2.0 * r1 * r12), 0.0)
        cos2 = np.where(r12 > 0, (r2**2 - r1**2 + r12**2) / (2.0 * r2 * r12), 0.0)
        inverse_r12 = np.where(r12 > 0, 1.0 / r12, 0.0)
    kinetic = 0.5 * (d1**2 + d2**2) + d12**2 + d1 * d12 * cos1 + d2 * d12 * cos2

    density = psi**2
    norm = float(np.sum(volume * density))
    return {
        "norm": norm,
        "kinetic": float(np.sum(volume * kinetic)) / norm,
        "potential": float(
            np.sum(volume * density * -model.v0 * (np.exp(-(r1**2)) + np.exp(-(r2**2))))
        )
        / norm,
        "inverse_r12": float(np.sum(volume * density * inverse_r12)) / norm,
    }


def _scaled_energy(model: QDotModel, values: Dict[str, float], coulomb: bool) -> float:
    repulsion = model.coulomb_scale * values["inverse_r12"] if coulomb else 0.0
    return values["kinetic"] + values["potential"] + repulsion


def qdot_energy(
    model: QDotModel,
    trial: QDotTrial,
    radial_order: int = QDOT_RADIAL_ORDER,
    angular_order: int = QDOT_ANGULAR_ORDER,
    coulomb: bool = True,
    check_stability: bool = False,
) -> QDotResult:
    """Variational energy E_T = lambda * E~ and lambda <1/r~12> for a trial."""
    values = _integrals(model, trial, _grid(trial, radial_order, angular_order))
    if not np.isfinite(values["norm"]) or values["norm"] <= 0:
        raise ContractViolationError(f"Trial {trial.as_vector()} is not normalizable on the grid")
    scaled = _scaled_energy(model, values, coulomb)

    flagged = False
    if check_stability:
        refined = _integrals(model, trial, _grid(trial, 2 * radial_order, 2 * angular_order))
        shift = model.width * (_scaled_energy(model, refined, coulomb) - scaled)
        if abs(shift) > QDOT_STABILITY_LIMIT:
            flagged = True
            logger.warning(
                f"Quantum-dot energy moved by {shift:.2e} under grid refinement for "
                f"lambda={model.width}, V0={model.depth}"
            )
    return QDotResult(
        model=model,
        trial=trial,
        energy=model.width * scaled,
        scaled_energy=scaled,
        inv_r12=model.width * values["inverse_r12"],
        inv_r12_scaled=values["inverse_r12"],
        radial_order=radial_order,
        angular_order=angular_order,
        flagged=flagged,
    )


def _normalizable(alpha: float, beta: float, gamma: float, d1: float, d2: float, chi0: AnsatzConfig) -> bool:
    # the Jastrow factor must not outgrow the orbital decay along r12
    return jastrow_growth(gamma, d1, d2) < chi0.b * min(alpha, beta) ** 2


def _trial_from_vector(vector: np.ndarray, chi0: AnsatzConfig, symmetric: bool) -> Optional[QDotTrial]:
    if symmetric:
        alpha, gamma, d1, d2 = vector
        beta = alpha
    else:
        alpha, beta, gamma, d1, d2 = vector
    if alpha <= 0 or beta <= 0 or d2 < 0:
        return None
    if not _normalizable(alpha, beta, gamma, d1, d2, chi0):
        return None
    return QDotTrial(chi0=chi0, alpha=alpha, beta=beta, gamma=gamma, delta1=d1, delta2=d2)


def _start_points(restarts: int, seed: int, symmetric: bool) -> List[np.ndarray]:
    start = np.array(QDOT_START)
    if symmetric:
        start = np.delete(start, 1)
    rng = np.random.default_rng(seed)
    points = [start]
    for _ in range(1, restarts):
        points.append(start * np.exp(rng.normal(0.0, QDOT_START_SPREAD, size=start.size)))
    return points


def optimize_qdot(
    model: QDotModel,
    restarts: int = QDOT_RESTARTS,
    seed: int = DEFAULT_SEED,
    chi0: Optional[AnsatzConfig] = None,
    symmetric: bool = False,
    radial_order: int = QDOT_RADIAL_ORDER,
    angular_order: int = QDOT_ANGULAR_ORDER,
) -> QDotResult:
    """Nelder-Mead over (alpha, beta, gamma, delta1, delta2) with chi0 frozen."""
    if restarts < 1:
        raise ContractViolationError(f"restarts must be at least 1, got {restarts}")
    if chi0 is None:
        chi0 = freeze_orbital(model, seed=seed)

    def objective(vector: np.ndarray) -> float:
        trial = _trial_from_vector(vector, chi0, symmetric)
        if trial is None:
            return OBJECTIVE_PENALTY
        try:
            energy = qdot_energy(model, trial, radial_order, angular_order).energy
        except GaussWellError:
            return OBJECTIVE_PENALTY
        return energy if np.isfinite(energy) else OBJECTIVE_PENALTY

    options = {
        "xatol": NELDER_MEAD_XATOL,
        "fatol": NELDER_MEAD_FATOL,
        "maxiter": NELDER_MEAD_MAXITER,
        "adaptive": True,
    }

    def run(x0: np.ndarray):
        return minimize(objective, x0, method="Nelder-Mead", options=options)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(run, _start_points(restarts, seed, symmetric)))

    best_value, best_vector = OBJECTIVE_PENALTY, None
    for restart, result in enumerate(results):
        logger.debug(f"QDot restart {restart}: E={result.fun:.8f}")
        if result.fun < best_value:
            best_value, best_vector = float(result.fun), result.x

    if best_vector is None:
        raise ContractViolationError(
            f"No valid quantum-dot trial found for lambda={model.width}, V0={model.depth}"
        )
    trial = _trial_from_vector(best_vector, chi0, symmetric)
    result = qdot_energy(model, trial, radial_order, angular_order, check_stability=True)
    logger.info(
        f"Quantum dot lambda={model.width} V0={model.depth}: E={result.energy:.6f}, "
        f"<1/r12>={result.inv_r12:.6f}"
    )
    return result
