# backend/tests/test_ansatz_service.py
# Unit tests for the variational Ansatz

import math

import numpy as np
import pytest

from app.exceptions import ContractViolationError, DegenerateSuperpositionError
from app.models.ansatz import AnsatzConfig
from app.models.mesh import MeshSpec
from app.models.well import WellSpec
from app.services.ansatz_service import (
    decay_hint,
    optimize,
    phi,
    phi_derivative,
    quadrature_rule,
    superposition_radial,
    trial_radial,
    variational_energy,
)
from app.services.spectrum_service import solve_well

CONFIGS = [(1.0, 2.0, 0.5), (0.5, 1.0, 0.2), (-1.0, 3.0, 0.0), (2.0, 1.5, -0.5)]


def test_phi_values_and_derivative():
    """Test phi at the origin and its derivative against a central difference."""
    assert phi(np.array([0.0]), 1.3, 0.2, 0.5)[0] == pytest.approx(1.3)
    r = np.linspace(0.1, 5.0, 20)
    step = 1e-6
    numeric = (phi(r + step, 1.3, 0.2, 0.5) - phi(r - step, 1.3, 0.2, 0.5)) / (2 * step)
    np.testing.assert_allclose(phi_derivative(r, 1.3, 0.2, 0.5), numeric, rtol=1e-7, atol=1e-9)


def test_pure_laguerre_rule_is_exact():
    """Test that split = 0 integrates r^k exp(-r) r^(d-1) exactly."""
    rule = quadrature_rule(WellSpec(v0=1.0, d=3), decay=0.5, order=20, split=0.0)
    for k in range(6):
        value = np.sum(rule.weights * rule.nodes**k * np.exp(-rule.nodes))
        assert value == pytest.approx(math.factorial(k + 2), rel=1e-10)


def test_composite_rule_is_accurate():
    """Test the Legendre-plus-Laguerre rule on smooth decaying integrands."""
    rule = quadrature_rule(WellSpec(v0=1.0, d=2), decay=0.5, order=40, split=6.0)
    for k in range(5):
        value = np.sum(rule.weights * rule.nodes**k * np.exp(-rule.nodes))
        assert value == pytest.approx(math.factorial(k + 1), rel=1e-10)


def test_decay_hint_tracks_binding():
    """Test sqrt(-2E) for a bound level and the fallback for an unbound one."""
    well = WellSpec(v0=10.0, d=3, ell=0)
    energy = solve_well(well, MeshSpec(size=150, h=1.0)).states[0].energy
    assert decay_hint(well) == pytest.approx(math.sqrt(-2.0 * energy))
    assert decay_hint(WellSpec(v0=0.5, d=3, ell=0)) == pytest.approx(0.05)


@pytest.mark.parametrize("v0", [7.0, 10.0, 20.0, 50.0, 100.0])
@pytest.mark.parametrize("d,ell", [(2, 0), (2, 1), (3, 0), (3, 1)])
def test_variational_energy_is_an_upper_bound(v0, d, ell):
    """Test that every trial lies above the converged mesh energy."""
    well = WellSpec(v0=v0, d=d, ell=ell)
    reference = solve_well(well).states[0].energy
    for config in CONFIGS:
        energy, _ = variational_energy(well, [config])
        assert energy >= reference - 1e-8


def test_quadrature_doubling_is_stable():
    """Test that doubling the quadrature order leaves the energy unchanged."""
    well = WellSpec(v0=10.0, d=3, ell=0)
    decay = decay_hint(well)
    coarse, _ = variational_energy(well, CONFIGS[:2], quadrature_rule(well, decay, 200))
    fine, _ = variational_energy(well, CONFIGS[:2], quadrature_rule(well, decay, 400))
    assert abs(coarse - fine) < 1e-8


def test_invalid_and_duplicate_terms_are_rejected():
    """Test the normalizability and distinctness checks."""
    well = WellSpec(v0=10.0, d=3, ell=0)
    with pytest.raises(ContractViolationError):
        variational_energy(well, [(1.0, -0.1, 0.5)])
    with pytest.raises(ContractViolationError):
        variational_energy(well, [(1.0, 0.2, -0.3)])
    with pytest.raises(ContractViolationError):
        variational_energy(well, [CONFIGS[0], CONFIGS[0]])
    with pytest.raises(ContractViolationError):
        variational_energy(well, [CONFIGS[0]], level=1)
    with pytest.raises(ValueError):
        AnsatzConfig(a=1.0, b=-1.0, s=0.5)


def test_nearly_identical_terms_are_degenerate():
    """Test that an almost singular overlap matrix is reported."""
    well = WellSpec(v0=10.0, d=3, ell=0)
    a, b, s = CONFIGS[0]
    with pytest.raises(DegenerateSuperpositionError):
        variational_energy(well, [(a, b, s), (a + 2e-6, b, s)])


def test_single_term_optimum():
    """Test that one optimized term is close to the mesh ground state."""
    well = WellSpec(v0=10.0, d=3, ell=0)
    reference = solve_well(well).states[0].energy
    state = optimize(well, terms=1, restarts=3)
    assert state.terms == 1
    assert reference - 1e-8 <= state.energy <= reference + 1e-3


def test_more_terms_never_raise_the_energy():
    """Test E(K=2) <= E(K=1) and a normalized trial function."""
    well = WellSpec(v0=10.0, d=3, ell=0)
    one = optimize(well, terms=1, restarts=2)
    two = optimize(well, terms=2, restarts=2)
    assert two.energy <= one.energy + 1e-10

    rule = quadrature_rule(well, decay_hint(well))
    radial = superposition_radial(two, rule.nodes)
    assert np.sum(rule.weights * radial**2) == pytest.approx(1.0, rel=1e-6)


def test_optimize_argument_checks():
    """Test rejection of bad term counts, levels and restarts."""
    well = WellSpec(v0=10.0, d=3, ell=0)
    with pytest.raises(ContractViolationError):
        optimize(well, terms=0)
    with pytest.raises(ContractViolationError):
        optimize(well, terms=1, level=1)
    with pytest.raises(ContractViolationError):
        optimize(well, terms=1, restarts=0)


@pytest.mark.slow
def test_excited_level_bound():
    """Test that the second root of a two-term trial bounds the first excited state."""
    well = WellSpec(v0=20.0, d=3, ell=0)
    reference = solve_well(well).states[1].energy
    state = optimize(well, terms=2, level=1, restarts=2)
    assert state.energy >= reference - 1e-8


def test_trial_radial_single_configuration():
    """Test R(0) for s- and p-waves and the r^ell exp(-phi) form."""
    config = AnsatzConfig(a=1.0, b=0.5, s=0.2)
    r = np.array([0.0, 0.5, 2.0])
    swave = trial_radial(r, config, WellSpec(v0=10.0, d=3, ell=0))
    pwave = trial_radial(r, config, WellSpec(v0=10.0, d=3, ell=1))
    assert swave[0] == pytest.approx(math.exp(-1.0))
    assert pwave[0] == 0.0
    np.testing.assert_allclose(pwave, r * np.exp(-phi(r, 1.0, 0.5, 0.2)))
    scaled = trial_radial(r, config, WellSpec(v0=10.0, d=3, ell=1), argument_scale=2.0)
    np.testing.assert_allclose(scaled, r * np.exp(-phi(2.0 * r, 1.0, 0.5, 0.2)))


@pytest.mark.slow
def test_single_term_p_wave_energy():
    """Test that one term reproduces the v0 = 100 p-wave energy -66.89622."""
    state = optimize(WellSpec(v0=100.0, d=3, ell=1), terms=1)
    assert state.energy == pytest.approx(-66.89622, abs=1e-5)
