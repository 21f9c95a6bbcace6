# backend/app/services/reproduce_service.py
# Side-by-side reproduction of the reference tables and figure data

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from app.models.critical import CriticalQuery
from app.models.deuteron import DeuteronModel
from app.models.mesh import MeshSpec
from app.models.qdot import QDotModel
from app.models.well import WellSpec
from app.services.ansatz_service import optimize
from app.services.critical_service import (
    extrapolate_critical,
    find_critical,
    fit_critical_curve,
    fit_threshold,
    hellmann_feynman_at_threshold,
    sweep_critical,
    threshold_samples,
)
from app.services.deuteron_service import (
    binding_energy_ansatz,
    binding_energy_lmm,
    binding_energy_threshold_formula,
)
from app.services.qdot_service import optimize_qdot
from app.services.spectrum_service import radial_moments, solve_well
from app.utils.constants import (
    CRITICAL_MESH_SIZE,
    DEFAULT_SEED,
    DEUTERON_LMM_ENERGIES,
    DEUTERON_MODELS,
    DEUTERON_PARAMETER_TOLERANCE,
    FIGURE1_ASYMPTOTE_TOLERANCE,
    FIGURE1_MESH_SIZES,
    FIGURE1_MONOTONE_NOISE,
    TABLE1_ENERGY_TOLERANCE,
    TABLE1_MOMENT_TOLERANCE,
    TABLE1_ROWS,
    TABLE2_CORRECTED,
    TABLE2_NONZERO_L,
    TABLE2_SWAVE,
    TABLE3_HELLMANN_FEYNMAN,
    TABLE3_NONZERO_L,
    TABLE3_SWAVE,
    TABLE3_TOLERANCE,
    TABLE3_TWOD,
    TABLE4_ANSATZ_TOLERANCE,
    TABLE4_ENERGIES,
    TABLE4_FORMULA_TOLERANCE,
    TABLE4_LMM_TOLERANCE,
    TABLE4_PARAMETERS,
    TABLE5_ENERGY_SLACK,
    TABLE5_INV_R12_TOLERANCE,
    TABLE5_ROWS,
    V0_CRITICAL_3D_GROUND,
    TableId,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["table", "quantity", "reference", "computed", "difference", "tolerance", "passed"]
FIGURE_COLUMNS = ["mesh_size", "h", "v0_critical", "fitted", "beta0", "tau", "passed"]


@dataclass
class ReproductionReport:
    table: TableId
    rows: List[Dict[str, Any]] = field(default_factory=list)
    columns: List[str] = field(default_factory=lambda: list(REPORT_COLUMNS))

    @property
    def passed(self) -> bool:
        return all(row.get("passed", True) is not False for row in self.rows)

    def compare(
        self,
        quantity: str,
        reference: float,
        computed: Optional[float],
        tolerance: Optional[float],
        one_sided: bool = False,
    ) -> None:
        """Add a row; tolerance None marks an informational row. One-sided rows accept improvements."""
        if computed is None:
            difference, passed = None, False if tolerance is not None else None
        else:
            difference = abs(computed - reference)
            if tolerance is None:
                passed = None
            elif one_sided:
                passed = computed - reference <= tolerance
            else:
                passed = difference <= tolerance
        if passed is False:
            logger.warning(f"{self.table.value} {quantity}: computed {computed} vs {reference}")
        self.rows.append(
            {
                "table": self.table.value,
                "quantity": quantity,
                "reference": reference,
                "computed": computed,
                "difference": difference,
                "tolerance": tolerance,
                "passed": passed,
            }
        )


def _state_name(d: int, n: int, ell: int) -> str:
    return f"{d}D({n},{ell})"


def _boldface_gate(
    report: ReproductionReport,
    name: str,
    well: WellSpec,
    n: int,
    energy: float,
    decimals: int,
    restarts: int,
    seed: int,
) -> None:
    k = n - well.ell
    state = optimize(well, terms=k, level=k - 1, restarts=restarts, seed=seed)
    # ground rows: the trial must hold the printed boldface decimals; excited rows are reported
    tolerance = 10.0**-decimals if k == 1 else None
    report.compare(f"{name} Ansatz K={k}", energy, state.energy, tolerance, one_sided=True)


def table1(ansatz: bool = True, restarts: int = 4, seed: int = DEFAULT_SEED) -> ReproductionReport:
    """Energies and radial moments of the listed states, each on its own mesh size."""
    report = ReproductionReport(TableId.TABLE1)
    for d, n, ell, v0, energy, mean_r, sigma_r, h, size, decimals in TABLE1_ROWS:
        well = WellSpec(v0=v0, d=d, ell=ell)
        state = solve_well(well, MeshSpec(size=size, h=h)).state(n, ell)
        name = f"{_state_name(d, n, ell)} v0={v0:g}"
        if state is None:
            report.compare(f"{name} E", energy, None, TABLE1_ENERGY_TOLERANCE)
            continue
        computed_mean, computed_sigma = radial_moments(state)
        report.compare(f"{name} E", energy, state.energy, TABLE1_ENERGY_TOLERANCE)
        report.compare(f"{name} <r>", mean_r, computed_mean, TABLE1_MOMENT_TOLERANCE)
        report.compare(f"{name} sigma_r", sigma_r, computed_sigma, TABLE1_MOMENT_TOLERANCE)
        if ansatz:
            _boldface_gate(report, name, well, n, state.energy, decimals, restarts, seed)
    return report


def table2(mesh_size: int = CRITICAL_MESH_SIZE, include_swave: bool = True) -> ReproductionReport:
    """Critical depths: direct bisection for l > 0, extrapolation in h for s-states."""
    report = ReproductionReport(TableId.TABLE2)
    for (d, n, ell), (value, tolerance) in TABLE2_NONZERO_L.items():
        query = CriticalQuery(d=d, n=n, ell=ell, tolerance=1e-9)
        v0_c = find_critical(query, mesh_size, 1.0)
        name = f"{_state_name(d, n, ell)} v0_c"
        if (d, n, ell) in TABLE2_CORRECTED:
            report.compare(f"{name} (printed)", value, v0_c, None)
            report.compare(f"{name} (corrected)", TABLE2_CORRECTED[(d, n, ell)], v0_c, tolerance)
        else:
            report.compare(name, value, v0_c, tolerance)
    if include_swave:
        for (d, n, ell), (value, tolerance) in TABLE2_SWAVE.items():
            fit = extrapolate_critical(CriticalQuery(d=d, n=n, ell=ell))
            report.compare(f"{_state_name(d, n, ell)} v0_c", value, fit.v0_critical, tolerance)
    return report


def table3() -> ReproductionReport:
    """Threshold expansion coefficients and Hellmann-Feynman slopes."""
    report = ReproductionReport(TableId.TABLE3)
    for (d, n, ell), reference in TABLE3_SWAVE.items():
        v0_c = TABLE2_SWAVE[(d, n, ell)][0]
        fit = fit_threshold(d, ell, v0_c, threshold_samples(d, ell, n, v0_c))
        for name, expected in zip(("gamma_2", "gamma_3", "gamma_4"), reference):
            report.compare(
                f"{_state_name(d, n, ell)} {name}", expected, fit.values[name], TABLE3_TOLERANCE
            )
    for (d, n, ell), reference in TABLE3_NONZERO_L.items():
        v0_c = find_critical(CriticalQuery(d=d, n=n, ell=ell, tolerance=1e-10), CRITICAL_MESH_SIZE, 1.0)
        fit = fit_threshold(d, ell, v0_c, threshold_samples(d, ell, n, v0_c))
        label = _state_name(d, n, ell)
        report.compare(f"{label} xi_2", reference[0], fit.values["xi_2"], TABLE3_TOLERANCE)
        # delta^(3/2) only enters at l = 1; the higher half-integer orders are reported
        for name, expected in zip(("xi_3", "xi_4"), reference[1:]):
            report.compare(f"{label} {name}", expected, fit.values[name], None)
        slope = hellmann_feynman_at_threshold(d, ell, n, v0_c)
        report.compare(f"{label} dE/dv0", TABLE3_HELLMANN_FEYNMAN[(d, n, ell)], slope, TABLE3_TOLERANCE)
        report.compare(f"{label} xi_2 - dE/dv0", 0.0, fit.values["xi_2"] - slope, TABLE3_TOLERANCE)
    for (d, n, ell), reference in TABLE3_TWOD.items():
        if ell == 0:
            v0_c = 0.0
        else:
            v0_c = find_critical(CriticalQuery(d=d, n=n, ell=ell), CRITICAL_MESH_SIZE, 1.0)
        fit = fit_threshold(d, ell, v0_c, threshold_samples(d, ell, n, v0_c))
        for name, expected in reference.items():
            report.compare(f"{_state_name(d, n, ell)} {name}", expected, fit.values[name], None)
    return report


def _compare_parameters(report: ReproductionReport, cutoff: float, terms: int, parameters) -> None:
    # only the one-term optimum is unique; wider superpositions are reported sorted by a
    tolerance = DEUTERON_PARAMETER_TOLERANCE if terms == 1 else None
    computed = sorted(parameters)
    for index, (expected, found) in enumerate(zip(TABLE4_PARAMETERS[(cutoff, terms)], computed)):
        for symbol, reference, value in zip(("a", "b", "s"), expected, found):
            report.compare(f"Lambda={cutoff:g} K={terms} {symbol}_{index + 1}", reference, value, tolerance)


def table4(restarts: int = 8, seed: int = DEFAULT_SEED) -> ReproductionReport:
    """Deuteron energies for both cutoffs, measured against the converged mesh energy."""
    report = ReproductionReport(TableId.TABLE4)
    formula_errors = {}
    for cutoff, couplings in DEUTERON_MODELS.items():
        model = DeuteronModel(cutoff=cutoff, **couplings)
        reference = TABLE4_ENERGIES[cutoff]
        lmm = binding_energy_lmm(model)
        report.compare(f"Lambda={cutoff:g} LMM (printed)", reference["LMM"], lmm.energy, None)
        report.compare(
            f"Lambda={cutoff:g} LMM (converged)",
            DEUTERON_LMM_ENERGIES[cutoff],
            lmm.energy,
            TABLE4_LMM_TOLERANCE,
        )
        for terms in (1, 2, 3):
            result = binding_energy_ansatz(model, terms=terms, restarts=restarts, seed=seed)
            if terms == 3:
                report.compare(
                    f"Lambda={cutoff:g} K=3 vs LMM", lmm.energy, result.energy, TABLE4_ANSATZ_TOLERANCE
                )
            else:
                report.compare(
                    f"Lambda={cutoff:g} K={terms} gap to LMM",
                    reference[f"K{terms}"] - reference["LMM"],
                    result.energy - lmm.energy,
                    TABLE4_ANSATZ_TOLERANCE,
                    one_sided=True,
                )
            _compare_parameters(report, cutoff, terms, result.parameters)
        formula = binding_energy_threshold_formula(model, v0_c=V0_CRITICAL_3D_GROUND)
        report.compare(
            f"Lambda={cutoff:g} threshold formula",
            reference["formula"],
            formula.energy,
            TABLE4_FORMULA_TOLERANCE,
        )
        formula_errors[cutoff] = abs(formula.energy / lmm.energy - 1.0)
    if len(formula_errors) == 2:
        ordered = [formula_errors[cutoff] for cutoff in sorted(formula_errors)]
        report.rows.append(
            {
                "table": TableId.TABLE4.value,
                "quantity": "formula relative error shrinks with Lambda",
                "reference": ordered[0],
                "computed": ordered[1],
                "difference": ordered[0] - ordered[1],
                "tolerance": None,
                "passed": ordered[1] < ordered[0],
            }
        )
    return report


def table5(restarts: int = 4, seed: int = DEFAULT_SEED) -> ReproductionReport:
    """Two-electron dot energies and <1/r12>."""
    report = ReproductionReport(TableId.TABLE5)
    for width, depth, energy, reference, inv_r12 in TABLE5_ROWS:
        result = optimize_qdot(QDotModel(width=width, depth=depth), restarts=restarts, seed=seed)
        name = f"lambda={width:g} V0={depth:g}"
        # printed energies below the numerical reference are bounded by the reference instead
        bound = max(energy, reference)
        report.compare(f"{name} E", bound, result.energy, TABLE5_ENERGY_SLACK, one_sided=True)
        inv_tolerance = TABLE5_INV_R12_TOLERANCE if energy >= reference - TABLE5_ENERGY_SLACK else None
        report.compare(f"{name} <1/r12>", inv_r12, result.inv_r12, inv_tolerance)
        report.compare(f"{name} quadrature flagged", 0.0, float(result.flagged), 0.0)
    return report


def figure1() -> ReproductionReport:
    """v0_c(h) curves of the 3D ground state for three mesh sizes and their shared asymptote."""
    report = ReproductionReport(TableId.FIGURE1, columns=list(FIGURE_COLUMNS))
    query = CriticalQuery(d=3, n=1, ell=0, mesh_sizes=FIGURE1_MESH_SIZES)
    curves = {size: fit_critical_curve(sweep_critical(query, size), size) for size in FIGURE1_MESH_SIZES}
    asymptote = curves[max(curves)].v0_critical
    for size, curve in sorted(curves.items()):
        monotone = all(
            b[1] <= a[1] + FIGURE1_MONOTONE_NOISE for a, b in zip(curve.samples, curve.samples[1:])
        )
        if not monotone:
            logger.warning(f"v0_c(h) curve for N={size} is not monotone")
        agrees = abs(curve.v0_critical - asymptote) <= FIGURE1_ASYMPTOTE_TOLERANCE
        for h, v0_c in curve.samples:
            report.rows.append(
                {
                    "mesh_size": size,
                    "h": h,
                    "v0_critical": v0_c,
                    "fitted": curve.evaluate(h),
                    "beta0": curve.v0_critical,
                    "tau": curve.tau,
                    "passed": monotone and agrees,
                }
            )
    return report


REPRODUCERS: Dict[TableId, Callable[..., ReproductionReport]] = {
    TableId.TABLE1: table1,
    TableId.TABLE2: table2,
    TableId.TABLE3: table3,
    TableId.TABLE4: table4,
    TableId.TABLE5: table5,
    TableId.FIGURE1: figure1,
}


def reproduce(table: TableId, **options) -> ReproductionReport:
    logger.info(f"Reproducing {table.value}")
    report = REPRODUCERS[table](**options)
    status = "passed" if report.passed else "FAILED"
    logger.info(f"{table.value}: {len(report.rows)} rows, {status}")
    return report
