# backend/tests/test_critical_service.py
# Unit tests for critical depths, h-extrapolation and threshold fits

import math

import numpy as np
import pytest

from app.exceptions import ContractViolationError, CriticalBracketError, ThresholdFitError
from app.models.critical import CriticalQuery
from app.models.mesh import MeshSpec
from app.models.well import WellSpec
from app.services.critical_service import (
    extrapolate_critical,
    find_critical,
    fit_critical_curve,
    fit_threshold,
    has_finite_critical_depth,
    hellmann_feynman_at_threshold,
    hellmann_feynman_slope,
    series_terms,
    significant_digits,
    threshold_kind,
    threshold_samples,
)
from app.services.spectrum_service import solve_well
from app.utils.constants import (
    TABLE2_CORRECTED,
    TABLE2_NONZERO_L,
    TABLE2_SWAVE,
    TABLE3_HELLMANN_FEYNMAN,
    TABLE3_NONZERO_L,
    TABLE3_SWAVE,
    TABLE3_TOLERANCE,
    ThresholdKind,
)


def test_find_critical_p_wave():
    """Test the 3D (2,1) critical depth on a fine mesh."""
    query = CriticalQuery(d=3, n=2, ell=1, tolerance=1e-9)
    assert find_critical(query, 1000, 1.0) == pytest.approx(6.049655, abs=1e-6)


def test_find_critical_brackets_a_sign_change():
    """Test that the energy changes sign across the critical depth."""
    query = CriticalQuery(d=3, n=1, ell=0)
    v0_c = find_critical(query, 300, 4.0)
    spec = MeshSpec(size=300, h=4.0)
    assert solve_well(WellSpec(v0=v0_c + 1e-4), spec).state(1) is not None
    assert solve_well(WellSpec(v0=v0_c - 1e-4), spec).state(1) is None


def test_two_dimensional_ground_state_has_no_critical_depth():
    """Test that the 2D ground state is rejected."""
    assert not has_finite_critical_depth(2, 0, 1)
    assert has_finite_critical_depth(2, 0, 2)
    with pytest.raises(ContractViolationError):
        find_critical(CriticalQuery(d=2, n=1, ell=0), 300, 1.0)


def test_explicit_bracket_without_sign_change():
    """Test that a bracket below the threshold is reported."""
    query = CriticalQuery(d=3, n=1, ell=0, bracket=(0.0, 1.0))
    with pytest.raises(CriticalBracketError):
        find_critical(query, 300, 1.0)


def test_query_validation():
    """Test rejection of impossible labels and loose tolerances."""
    with pytest.raises(ValueError):
        CriticalQuery(d=3, n=1, ell=1)
    with pytest.raises(ValueError):
        CriticalQuery(d=3, n=1, ell=0, tolerance=1e-3)
    with pytest.raises(ValueError):
        CriticalQuery(d=3, n=1, ell=0, h_grid=(2.0, 1.0))


def test_fit_recovers_constant_curve():
    """Test that a flat v0_c(h) extrapolates to its value."""
    samples = [(1.5**i, 5.0) for i in range(8)]
    fit = fit_critical_curve(samples, 500)
    assert fit.v0_critical == pytest.approx(5.0, abs=1e-8)
    assert fit.residual < 1e-8


def test_fit_recovers_power_series():
    """Test recovery of beta0 from data generated at tau = 1."""
    beta = (1.3, 0.2, -0.1, 0.05)
    samples = [(h, sum(b * h**-i for i, b in enumerate(beta))) for h in (1.5**i for i in range(8))]
    fit = fit_critical_curve(samples, 700)
    assert fit.v0_critical == pytest.approx(1.3, abs=1e-6)
    assert fit.evaluate(2.0) == pytest.approx(sum(b * 2.0**-i for i, b in enumerate(beta)), abs=1e-6)
    assert not fit.flagged


def test_fit_requires_enough_samples():
    """Test that fewer than five samples are rejected and six are flagged."""
    with pytest.raises(ContractViolationError):
        fit_critical_curve([(1.0, 1.0), (2.0, 1.0)], 500)
    fit = fit_critical_curve([(1.5**i, 2.0 + 1.5**-i) for i in range(5)], 500)
    assert fit.flagged


def test_significant_digits():
    """Test the agreement count between two estimates."""
    assert significant_digits(1.342002, 1.342501) == 3
    assert significant_digits(2.0, 2.0) == 12
    assert significant_digits(1.0, 3.0) == 0


def test_threshold_kinds():
    """Test the expansion chosen for each (d, l) class."""
    assert threshold_kind(3, 0) == ThresholdKind.SWAVE_3D
    assert threshold_kind(3, 2) == ThresholdKind.NONZERO_L_3D
    assert threshold_kind(2, 0) == ThresholdKind.TWOD_GROUND
    assert threshold_kind(2, 1) == ThresholdKind.TWOD_LOG
    assert threshold_kind(2, 3) == ThresholdKind.TWOD_LINEAR
    with pytest.raises(ContractViolationError):
        threshold_kind(4, 0)


def _window(v0_c: float, count: int = 20):
    return v0_c + np.geomspace(1e-3, 0.3, count)


def test_fit_threshold_swave_synthetic():
    """Test recovery of gamma coefficients from exact data."""
    v0 = _window(1.0)
    delta = v0 - 1.0
    energy = -0.2 * delta**2 + 0.1 * delta**3 - 0.05 * delta**4
    fit = fit_threshold(3, 0, 1.0, list(zip(v0, energy)))
    assert fit.values["gamma_2"] == pytest.approx(-0.2, abs=1e-8)
    assert fit.values["gamma_3"] == pytest.approx(0.1, abs=1e-7)
    assert fit.values["gamma_4"] == pytest.approx(-0.05, abs=1e-5)
    assert fit.leading_negative


def test_fit_threshold_nonzero_l_synthetic():
    """Test recovery of xi coefficients from exact data."""
    v0 = _window(6.0)
    delta = v0 - 6.0
    energy = -0.14 * delta - 0.07 * delta**1.5 - 0.008 * delta**2
    fit = fit_threshold(3, 1, 6.0, list(zip(v0, energy)))
    assert fit.values["xi_2"] == pytest.approx(-0.14, abs=1e-8)
    assert fit.values["xi_3"] == pytest.approx(-0.07, abs=1e-7)
    assert fit.values["xi_4"] == pytest.approx(-0.008, abs=1e-5)


def test_fit_threshold_two_dimensional_forms():
    """Test the exponential, logarithmic and linear 2D forms."""
    v0 = np.geomspace(0.5, 3.0, 15)
    energy = -0.01 * np.exp(-2.0 / v0)
    ground = fit_threshold(2, 0, 0.0, list(zip(v0, energy)))
    assert ground.values["eta_1"] == pytest.approx(-0.01, rel=1e-8)
    assert ground.values["eta_2"] == pytest.approx(-2.0, rel=1e-8)
    assert ground.alternate_residual == pytest.approx(ground.residual, abs=1e-12)

    v0 = _window(3.0)
    delta = v0 - 3.0
    log_form = fit_threshold(2, 1, 3.0, list(zip(v0, 0.3 * delta / np.log(delta))))
    assert log_form.values["eta_1"] == pytest.approx(0.3, rel=1e-10)

    linear = fit_threshold(2, 2, 3.0, list(zip(v0, -0.2 * delta)))
    assert linear.values["eta_1"] == pytest.approx(-0.2, rel=1e-10)


def test_fit_threshold_rejects_bad_samples():
    """Test rejection of samples at or below v0_c and of degenerate designs."""
    with pytest.raises(ContractViolationError):
        fit_threshold(3, 0, 1.0, [(1.0, -1e-6), (1.1, -1e-3)])
    with pytest.raises(ContractViolationError):
        fit_threshold(3, 0, 1.0, [(1.1, 1e-3)])
    with pytest.raises(ThresholdFitError):
        fit_threshold(3, 0, 1.0, [(1.1, -1e-3)] * 5)


def test_threshold_samples_are_bound_and_increasing():
    """Test samples just above the 3D p-wave threshold."""
    samples = threshold_samples(
        3, 1, 2, 6.049655, window=(1e-2, 0.3), count=6, mesh_spec=MeshSpec(size=300, h=1.0)
    )
    assert len(samples) == 6
    assert all(energy < 0 for _, energy in samples)
    depths = [v0 for v0, _ in samples]
    assert depths == sorted(depths)


def test_hellmann_feynman_matches_finite_difference():
    """Test dE/dv0 = -<exp(-r^2)> against a central difference."""
    spec = MeshSpec(size=300, h=1.0)
    state = solve_well(WellSpec(v0=10.0, d=3, ell=1), spec).states[0]
    offset = 1e-4
    upper = solve_well(WellSpec(v0=10.0 + offset, d=3, ell=1), spec).states[0].energy
    lower = solve_well(WellSpec(v0=10.0 - offset, d=3, ell=1), spec).states[0].energy
    slope = hellmann_feynman_slope(state)
    assert slope < 0
    assert slope == pytest.approx((upper - lower) / (2 * offset), abs=1e-6)


@pytest.mark.slow
def test_extrapolated_ground_state_critical_depth():
    """Test the h-extrapolated 3D ground-state critical depth."""
    fit = extrapolate_critical(CriticalQuery(d=3, n=1, ell=0))
    assert fit.v0_critical == pytest.approx(1.342002, abs=1e-3)
    assert set(fit.beta0_by_mesh) == {500, 700, 1000}
    assert fit.significant_digits is not None and fit.significant_digits >= 3
    assert math.isfinite(fit.tau)


def test_fit_threshold_pure_quadratic():
    """Test that E = -delta^2 gives gamma_2 = -1 and vanishing higher terms."""
    v0 = _window(1.342002)
    energy = -((v0 - 1.342002) ** 2)
    fit = fit_threshold(3, 0, 1.342002, list(zip(v0, energy)))
    assert fit.values["gamma_2"] == pytest.approx(-1.0, abs=1e-8)
    assert fit.values["gamma_3"] == pytest.approx(0.0, abs=1e-7)
    assert fit.values["gamma_4"] == pytest.approx(0.0, abs=1e-6)
    assert fit.residual < 1e-12


def test_series_terms_carry_extra_orders():
    """Test the fitted powers of both 3D series."""
    assert series_terms(ThresholdKind.SWAVE_3D)[:3] == [("gamma_2", 2.0), ("gamma_3", 3.0), ("gamma_4", 4.0)]
    assert [power for _, power in series_terms(ThresholdKind.NONZERO_L_3D)][:3] == [1.0, 1.5, 2.0]
    assert len(series_terms(ThresholdKind.SWAVE_3D)) > 3


def test_fit_threshold_needs_one_sample_per_term():
    """Test that too few samples for the series are rejected."""
    v0 = _window(1.0, count=4)
    energy = -((v0 - 1.0) ** 2)
    with pytest.raises(ContractViolationError):
        fit_threshold(3, 0, 1.0, list(zip(v0, energy)))


def test_fit_threshold_isolates_higher_orders():
    """Test that a delta^5 term does not leak into gamma_3 or gamma_4."""
    v0 = _window(1.0)
    delta = v0 - 1.0
    energy = -0.22 * delta**2 + 0.097 * delta**3 - 0.068 * delta**4 + 0.07 * delta**5
    fit = fit_threshold(3, 0, 1.0, list(zip(v0, energy)))
    assert fit.values["gamma_3"] == pytest.approx(0.097, abs=1e-6)
    assert fit.values["gamma_4"] == pytest.approx(-0.068, abs=1e-5)


@pytest.mark.slow
@pytest.mark.parametrize("label", list(TABLE2_NONZERO_L), ids=str)
def test_nonzero_l_critical_depths(label):
    """Test every l > 0 critical depth on the N = 1000 mesh."""
    d, n, ell = label
    value, tolerance = TABLE2_NONZERO_L[label]
    expected = TABLE2_CORRECTED.get(label, value)
    v0_c = find_critical(CriticalQuery(d=d, n=n, ell=ell, tolerance=1e-9), 1000, 1.0)
    assert v0_c == pytest.approx(expected, abs=tolerance)


@pytest.mark.slow
def test_printed_depth_differs_by_swapped_digits():
    """Test that the printed (3, 4, 3) depth misses only through its swapped digits."""
    v0_c = find_critical(CriticalQuery(d=3, n=4, ell=3, tolerance=1e-9), 1000, 1.0)
    assert v0_c == pytest.approx(23.553930852, abs=1e-8)
    assert abs(v0_c - TABLE2_NONZERO_L[(3, 4, 3)][0]) > 8e-6


@pytest.mark.slow
@pytest.mark.parametrize(
    "label", [label for label in TABLE2_SWAVE if label != (3, 1, 0)], ids=str
)
def test_swave_extrapolated_critical_depths(label):
    """Test the h-extrapolated excited s-wave critical depths in 2D and 3D."""
    d, n, ell = label
    value, tolerance = TABLE2_SWAVE[label]
    fit = extrapolate_critical(CriticalQuery(d=d, n=n, ell=ell))
    assert fit.v0_critical == pytest.approx(value, abs=tolerance)


@pytest.mark.slow
@pytest.mark.parametrize("label", list(TABLE3_SWAVE), ids=str)
def test_swave_threshold_coefficients(label):
    """Test gamma_2, gamma_3 and gamma_4 fitted from mesh energies."""
    d, n, ell = label
    v0_c = TABLE2_SWAVE[label][0]
    fit = fit_threshold(d, ell, v0_c, threshold_samples(d, ell, n, v0_c))
    for name, expected in zip(("gamma_2", "gamma_3", "gamma_4"), TABLE3_SWAVE[label]):
        assert fit.values[name] == pytest.approx(expected, abs=TABLE3_TOLERANCE)


@pytest.mark.slow
@pytest.mark.parametrize("label", list(TABLE3_NONZERO_L), ids=str)
def test_nonzero_l_threshold_slope(label):
    """Test xi_2 and the Hellmann-Feynman slope at threshold."""
    d, n, ell = label
    v0_c = find_critical(CriticalQuery(d=d, n=n, ell=ell, tolerance=1e-10), 1000, 1.0)
    fit = fit_threshold(d, ell, v0_c, threshold_samples(d, ell, n, v0_c))
    slope = hellmann_feynman_at_threshold(d, ell, n, v0_c)
    assert fit.values["xi_2"] == pytest.approx(TABLE3_NONZERO_L[label][0], abs=TABLE3_TOLERANCE)
    assert slope == pytest.approx(TABLE3_HELLMANN_FEYNMAN[label], abs=TABLE3_TOLERANCE)
    assert fit.values["xi_2"] == pytest.approx(slope, abs=TABLE3_TOLERANCE)
