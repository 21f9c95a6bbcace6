# backend/app/services/critical_service.py
# Critical depths, their extrapolation in h and near-threshold expansions

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect, least_squares

from app.exceptions import (
    ContractViolationError,
    CriticalBracketError,
    EigensolverError,
    MeshConvergenceError,
    ThresholdFitError,
)
from app.models.critical import CriticalFit, CriticalQuery, ThresholdCoefficients
from app.models.mesh import MeshSpec
from app.models.well import BoundState, WellSpec
from app.services.mesh_service import build_mesh, mesh_expectation
from app.services.spectrum_service import level_energy, resolve_mesh_spec, solve_well
from app.utils.constants import (
    CAP_JUMP_LIMIT,
    CAP_TREND_FACTOR,
    CRITICAL_BRACKET_MAX,
    CRITICAL_BRACKET_START,
    FIT_RESIDUAL_LIMIT,
    H_GRID_MIN_POINTS,
    HELLMANN_FEYNMAN_OFFSET,
    MAX_SIGNIFICANT_DIGITS,
    TAU_BOUNDS,
    TAU_RANGE,
    THRESHOLD_CONDITION_LIMIT,
    THRESHOLD_EXTRA_TERMS,
    THRESHOLD_MESH_SIZE,
    THRESHOLD_SAMPLES,
    THRESHOLD_SCALING_L,
    THRESHOLD_SCALING_S,
    THRESHOLD_WINDOW,
    THRESHOLD_WINDOW_2D_GROUND,
    ThresholdKind,
)
from app.utils.records import get_store
from app.utils.settings import worker_count

logger = logging.getLogger(__name__)


def _query_well(query: CriticalQuery, v0: float) -> WellSpec:
    return WellSpec(v0=v0, d=query.d, ell=query.ell)


def has_finite_critical_depth(d: int, ell: int, k: int) -> bool:
    # any attraction binds the 2D ground state
    return not (d == 2 and ell == 0 and k == 1)


def find_critical(query: CriticalQuery, size: int, h: float) -> float:
    """Depth at which the queried level reaches zero energy on one mesh."""
    if not has_finite_critical_depth(query.d, query.ell, query.k):
        raise ContractViolationError(
            "The 2D ground state is bound for every v0 > 0; it has no finite critical depth"
        )
    mesh_spec = resolve_mesh_spec(_query_well(query, 0.0), MeshSpec(size=size, h=h))
    store = get_store()
    inputs = {
        "d": query.d, "n": query.n, "ell": query.ell, "size": size, "h": h,
        "tolerance": query.resolved_tolerance, "bracket": query.bracket,
    }
    cached = store.get("critical", inputs)
    if cached is not None:
        return float(cached)

    def energy(v0: float) -> float:
        return level_energy(_query_well(query, v0), mesh_spec, query.k)

    if query.bracket is not None:
        low, high = query.bracket
        if energy(low) < 0 or energy(high) >= 0:
            raise CriticalBracketError((low, high), query.label)
    else:
        low, high = 0.0, CRITICAL_BRACKET_START
        while energy(high) >= 0:
            low, high = high, 2.0 * high
            if high > CRITICAL_BRACKET_MAX:
                raise CriticalBracketError((0.0, high), query.label)

    v0_c = float(bisect(energy, low, high, xtol=query.resolved_tolerance))
    logger.info(f"Critical depth {query.label} N={size} h={h}: v0_c={v0_c:.10f}")
    store.put("critical", inputs, v0_c)
    return v0_c


def _solve_point(query: CriticalQuery, size: int, h: float) -> Optional[float]:
    try:
        return find_critical(query, size, h)
    except (CriticalBracketError, EigensolverError, MeshConvergenceError) as e:
        logger.warning(f"Critical sweep point N={size} h={h} failed: {e.detail}")
        return None


def sweep_critical(query: CriticalQuery, size: int) -> List[Tuple[float, float]]:
    """v0_c(h) over the query's h grid, truncated at the numerical cap."""
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        values = list(pool.map(lambda h: _solve_point(query, size, h), query.h_grid))

    samples: List[Tuple[float, float]] = []
    previous_change: Optional[float] = None
    for h, v0_c in zip(query.h_grid, values):
        if v0_c is None:
            logger.info(f"Cap reached for {query.label} N={size} at h={h}: no critical depth")
            break
        if samples:
            change = v0_c - samples[-1][1]
            upward_jump = change > CAP_JUMP_LIMIT
            broken_trend = (
                change < -CAP_JUMP_LIMIT
                and previous_change is not None
                and abs(change) > CAP_TREND_FACTOR * abs(previous_change)
            )
            if upward_jump or broken_trend:
                logger.info(
                    f"Cap reached for {query.label} N={size} at h={h}: jump {change:.3e}"
                )
                break
            previous_change = change
        samples.append((h, v0_c))
    return samples


def _critical_model(params: np.ndarray, h: np.ndarray) -> np.ndarray:
    beta, tau = params[:4], params[4]
    return sum(beta[i] * h ** (-i * tau) for i in range(4))


def fit_critical_curve(samples: Sequence[Tuple[float, float]], mesh_size: int) -> CriticalFit:
    """Least-squares fit of v0_c(h) = beta0 + beta1 h^-tau + beta2 h^-2tau + beta3 h^-3tau."""
    if len(samples) < 5:
        raise ContractViolationError(
            f"At least 5 (h, v0_c) samples are needed for the fit, got {len(samples)}"
        )
    h = np.array([sample[0] for sample in samples], dtype=float)
    v = np.array([sample[1] for sample in samples], dtype=float)

    # linear fit at tau = 1 seeds the nonlinear one
    design = np.column_stack([h ** (-i) for i in range(4)])
    seed, *_ = np.linalg.lstsq(design, v, rcond=None)
    x0 = np.append(seed, 1.0)
    lower = [-np.inf] * 4 + [TAU_BOUNDS[0]]
    upper = [np.inf] * 4 + [TAU_BOUNDS[1]]
    result = least_squares(
        lambda p: _critical_model(p, h) - v, x0, bounds=(lower, upper), xtol=1e-14, ftol=1e-14
    )
    params = result.x
    residual = float(np.sqrt(np.mean((_critical_model(params, h) - v) ** 2)))
    tau = float(params[4])
    flagged = (
        residual > FIT_RESIDUAL_LIMIT
        or not TAU_RANGE[0] < tau < TAU_RANGE[1]
        or len(samples) < H_GRID_MIN_POINTS
    )
    if flagged:
        logger.warning(
            f"Critical fit for N={mesh_size} flagged: residual={residual:.2e}, tau={tau:.3f}, "
            f"points={len(samples)}"
        )
    return CriticalFit(
        beta=tuple(float(b) for b in params[:4]),
        tau=tau,
        residual=residual,
        mesh_size=mesh_size,
        samples=tuple((float(a), float(b)) for a, b in samples),
        flagged=flagged,
    )


def significant_digits(first: float, second: float) -> int:
    """Decimals on which two estimates agree."""
    difference = abs(first - second)
    if difference == 0:
        return MAX_SIGNIFICANT_DIGITS
    return int(min(MAX_SIGNIFICANT_DIGITS, max(0, math.floor(-math.log10(difference)))))


def extrapolate_critical(query: CriticalQuery) -> CriticalFit:
    """Extrapolate v0_c(h) to h -> infinity for every mesh size; report the largest."""
    if query.ell != 0:
        logger.info(f"Extrapolating {query.label}; direct bisection already converges for l > 0")
    fits: Dict[int, CriticalFit] = {}
    for size in query.mesh_sizes:
        samples = sweep_critical(query, size)
        fits[size] = fit_critical_curve(samples, size)
        logger.info(f"{query.label} N={size}: beta0={fits[size].v0_critical:.8f}")

    sizes = sorted(fits)
    best = fits[sizes[-1]]
    digits = None
    if len(sizes) >= 2:
        digits = significant_digits(fits[sizes[-1]].v0_critical, fits[sizes[-2]].v0_critical)
    return CriticalFit(
        beta=best.beta,
        tau=best.tau,
        residual=best.residual,
        mesh_size=best.mesh_size,
        samples=best.samples,
        flagged=best.flagged,
        beta0_by_mesh={size: fit.v0_critical for size, fit in fits.items()},
        significant_digits=digits,
    )


def threshold_kind(d: int, ell: int) -> ThresholdKind:
    if d == 3:
        return ThresholdKind.SWAVE_3D if ell == 0 else ThresholdKind.NONZERO_L_3D
    if d == 2:
        if ell == 0:
            return ThresholdKind.TWOD_GROUND
        return ThresholdKind.TWOD_LOG if ell == 1 else ThresholdKind.TWOD_LINEAR
    raise ContractViolationError(f"No threshold expansion is available for d={d}")


# coefficient prefix and the power step: gamma_n multiplies delta^n, xi_n multiplies delta^(n/2)
_POWER_SERIES = {
    ThresholdKind.SWAVE_3D: ("gamma", 1.0),
    ThresholdKind.NONZERO_L_3D: ("xi", 0.5),
}


def series_terms(kind: ThresholdKind) -> List[Tuple[str, float]]:
    """Names and powers of the fitted series, reported orders first."""
    prefix, step = _POWER_SERIES[kind]
    return [(f"{prefix}_{n}", n * step) for n in range(2, 5 + THRESHOLD_EXTRA_TERMS)]


def _checked_lstsq(design: np.ndarray, target: np.ndarray, kind: ThresholdKind) -> np.ndarray:
    # unit-norm columns
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0):
        raise ThresholdFitError(kind.value, float("inf"))
    scaled = design / norms
    condition = float(np.linalg.cond(scaled))
    if not np.isfinite(condition) or condition > THRESHOLD_CONDITION_LIMIT:
        logger.error(f"Threshold fit {kind.value} ill-conditioned: {condition:.3e}")
        raise ThresholdFitError(kind.value, condition)
    solution, *_ = np.linalg.lstsq(scaled, target, rcond=None)
    return solution / norms


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(values**2)))


def fit_threshold(
    d: int, ell: int, v0_c: float, samples: Sequence[Tuple[float, float]]
) -> ThresholdCoefficients:
    """Fit the near-threshold form of E(v0) for the state's (d, ell) class."""
    kind = threshold_kind(d, ell)
    if not samples:
        raise ContractViolationError("At least one (v0, E) sample is required")
    v0 = np.array([sample[0] for sample in samples], dtype=float)
    energy = np.array([sample[1] for sample in samples], dtype=float)
    if np.any(v0 <= v0_c):
        raise ContractViolationError("All samples must lie strictly above the critical depth")
    if np.any(energy >= 0):
        raise ContractViolationError("All sampled energies must be negative")
    delta = v0 - v0_c
    window = (float(delta.min()), float(delta.max()))

    alternate_residual = None
    alternate_values = None
    if kind in _POWER_SERIES:
        terms = series_terms(kind)
        if len(samples) < len(terms):
            raise ContractViolationError(
                f"At least {len(terms)} samples are needed for the {kind.value} series, got {len(samples)}"
            )
        names = [name for name, _ in terms]
        design = np.column_stack([delta**power for _, power in terms])
        coefficients = _checked_lstsq(design, energy, kind)
        values = dict(zip(names, (float(c) for c in coefficients)))
        predicted = design @ coefficients
    elif kind == ThresholdKind.TWOD_GROUND:
        # E = eta_1 exp(eta_2 / (v0 - v0_c)); a second reading uses 1/v0 - v0_c
        log_energy = np.log(-energy)
        design = np.column_stack([np.ones_like(delta), 1.0 / delta])
        intercept, slope = _checked_lstsq(design, log_energy, kind)
        values = {"eta_1": -float(np.exp(intercept)), "eta_2": float(slope)}
        predicted = -np.exp(design @ np.array([intercept, slope]))

        alternate = np.column_stack([np.ones_like(v0), 1.0 / v0 - v0_c])
        alt_intercept, alt_slope = _checked_lstsq(alternate, log_energy, kind)
        alternate_values = {"eta_1": -float(np.exp(alt_intercept)), "eta_2": float(alt_slope)}
        alternate_residual = _rms(-np.exp(alternate @ np.array([alt_intercept, alt_slope])) - energy)
    elif kind == ThresholdKind.TWOD_LOG:
        shape = delta / np.log(delta)
        eta = float(np.mean(energy / shape))
        values = {"eta_1": eta}
        predicted = eta * shape
    else:
        eta = float(np.mean(energy / delta))
        values = {"eta_1": eta}
        predicted = eta * delta

    leading_negative = bool(np.all(predicted < 0))
    if not leading_negative:
        logger.warning(f"Threshold fit {kind.value} predicts non-negative energies in its window")
    residual = _rms(predicted - energy)
    logger.info(f"Threshold fit {kind.value} d={d} l={ell}: {values}, residual={residual:.2e}")
    return ThresholdCoefficients(
        kind=kind,
        values=values,
        v0_c=v0_c,
        window=window,
        residual=residual,
        alternate_residual=alternate_residual,
        alternate_values=alternate_values,
        leading_negative=leading_negative,
    )


def threshold_mesh(d: int, ell: int, size: int = THRESHOLD_MESH_SIZE) -> MeshSpec:
    h = THRESHOLD_SCALING_S if ell == 0 else THRESHOLD_SCALING_L
    return MeshSpec(size=size, h=h)


def threshold_samples(
    d: int,
    ell: int,
    n: int,
    v0_c: float,
    window: Optional[Tuple[float, float]] = None,
    count: int = THRESHOLD_SAMPLES,
    mesh_spec: Optional[MeshSpec] = None,
) -> List[Tuple[float, float]]:
    """Log-spaced (v0, E) samples just above the critical depth."""
    if window is None:
        window = THRESHOLD_WINDOW_2D_GROUND if (d == 2 and ell == 0 and v0_c == 0) else THRESHOLD_WINDOW
    if mesh_spec is None:
        mesh_spec = threshold_mesh(d, ell)
    threshold_well = WellSpec(v0=v0_c, d=d, ell=ell)
    k = threshold_well.radial_index(n)
    if k < 1:
        raise ContractViolationError(f"No state labelled n={n} for l={ell}")
    depths = v0_c + np.geomspace(window[0], window[1], count)

    def sample(v0: float) -> Optional[Tuple[float, float]]:
        well = WellSpec(v0=float(v0), d=d, ell=ell)
        energy = level_energy(well, mesh_spec, k)
        return (float(v0), energy) if energy < 0 else None

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(sample, depths))
    kept = [result for result in results if result is not None]
    if len(kept) < len(results):
        logger.warning(f"Dropped {len(results) - len(kept)} unbound threshold samples")
    return kept


def hellmann_feynman_slope(state: BoundState) -> float:
    """dE/dv0 = -<exp(-r^2)> for a bound state."""
    mesh = build_mesh(state.mesh_spec)
    return -mesh_expectation(state.coefficients, lambda r: np.exp(-(r**2)), mesh)


def hellmann_feynman_at_threshold(
    d: int, ell: int, n: int, v0_c: float, mesh_spec: Optional[MeshSpec] = None
) -> float:
    """Slope of E(v0) evaluated just above the critical depth."""
    if mesh_spec is None:
        mesh_spec = threshold_mesh(d, ell)
    well = WellSpec(v0=v0_c + HELLMANN_FEYNMAN_OFFSET, d=d, ell=ell)
    state = solve_well(well, mesh_spec).state(n, ell)
    if state is None:
        raise ContractViolationError(
            f"State (n={n}, l={ell}) is not bound at v0={well.v0}; check v0_c"
        )
    return hellmann_feynman_slope(state)
