# backend/app/services/deuteron_service.py
# Leading-order deuteron binding energy via the dimensionless Gaussian well

import logging
from typing import Optional, Sequence

from app.exceptions import SubcriticalWellError
from app.models.deuteron import DeuteronModel, DeuteronResult
from app.models.mesh import MeshSpec
from app.models.well import WellSpec
from app.services.ansatz_service import optimize
from app.services.spectrum_service import solve_well
from app.utils.constants import (
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DEUTERON_ARGUMENT_SCALE,
    DEUTERON_MESH_SIZE,
    TABLE3_SWAVE,
    V0_CRITICAL_3D_GROUND,
    DeuteronMethod,
)

logger = logging.getLogger(__name__)


def effective_v0(model: DeuteronModel) -> float:
    """v0 = -4 (C1 + C2) / ((hbar^2/mu) Lambda^2) for the triplet channel."""
    return -4.0 * model.coupling / (model.hbar2_over_mu * model.cutoff**2)


def energy_scale(model: DeuteronModel) -> float:
    """MeV per unit of dimensionless energy: (hbar^2/mu) Lambda^2 / 4."""
    return model.hbar2_over_mu * model.cutoff**2 / 4.0


def _result(model: DeuteronModel, method: DeuteronMethod, energy: Optional[float], **extra) -> DeuteronResult:
    return DeuteronResult(
        method=method,
        cutoff=model.cutoff,
        v0=effective_v0(model),
        energy_scale=energy_scale(model),
        energy=energy,
        bound=energy is not None and energy < 0,
        **extra,
    )


def binding_energy_lmm(
    model: DeuteronModel, mesh_spec: Optional[MeshSpec] = None
) -> DeuteronResult:
    """Ground-state energy in MeV from the Lagrange-mesh solve."""
    v0 = effective_v0(model)
    if v0 <= V0_CRITICAL_3D_GROUND:
        logger.info(
            f"{model.channel.value} channel at Lambda={model.cutoff}: v0={v0:.6f} is subcritical, "
            "no bound state"
        )
        return _result(model, DeuteronMethod.LMM, None)
    if mesh_spec is None:
        mesh_spec = MeshSpec(size=DEUTERON_MESH_SIZE, h=1.0)
    ground = solve_well(WellSpec(v0=v0, d=3, ell=0), mesh_spec).state(1, 0)
    if ground is None:
        logger.warning(f"Mesh {mesh_spec} lost the ground state at v0={v0:.6f}")
        return _result(model, DeuteronMethod.LMM, None)
    energy = energy_scale(model) * ground.energy
    logger.info(f"Deuteron LMM Lambda={model.cutoff}: v0={v0:.6f}, E={energy:.6f} MeV")
    return _result(model, DeuteronMethod.LMM, energy)


def binding_energy_ansatz(
    model: DeuteronModel,
    terms: int = 1,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
) -> DeuteronResult:
    """Variational energy in MeV with the trial written in Lambda * r12."""
    v0 = effective_v0(model)
    if v0 <= V0_CRITICAL_3D_GROUND:
        raise SubcriticalWellError(v0, V0_CRITICAL_3D_GROUND)
    state = optimize(
        WellSpec(v0=v0, d=3, ell=0),
        terms=terms,
        restarts=restarts,
        seed=seed,
        argument_scale=DEUTERON_ARGUMENT_SCALE,
    )
    energy = energy_scale(model) * state.energy
    logger.info(f"Deuteron Ansatz K={terms} Lambda={model.cutoff}: E={energy:.6f} MeV")
    return _result(
        model,
        DeuteronMethod.ANSATZ,
        energy,
        terms=terms,
        parameters=[config.as_tuple() for config in state.configs],
    )


def binding_energy_threshold_formula(
    model: DeuteronModel,
    gammas: Optional[Sequence[float]] = None,
    v0_c: float = V0_CRITICAL_3D_GROUND,
) -> DeuteronResult:
    """E = scale * (gamma_2 d^2 + gamma_3 d^3 + gamma_4 d^4), d = v0 - v0_c."""
    v0 = effective_v0(model)
    if v0 < v0_c:
        raise SubcriticalWellError(v0, v0_c)
    if gammas is None:
        gammas = TABLE3_SWAVE[(3, 1, 0)]
    delta = v0 - v0_c
    dimensionless = sum(g * delta ** (power + 2) for power, g in enumerate(gammas))
    energy = energy_scale(model) * dimensionless
    logger.info(f"Deuteron threshold formula Lambda={model.cutoff}: E={energy:.6f} MeV")
    return DeuteronResult(
        method=DeuteronMethod.THRESHOLD_FORMULA,
        cutoff=model.cutoff,
        v0=v0,
        energy_scale=energy_scale(model),
        energy=float(energy),
        bound=delta > 0,
    )
