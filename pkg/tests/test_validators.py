# backend/tests/test_validators.py
# Unit tests for validator functions

from app.utils.validators import (
    validate_mesh_size,
    validate_scaling,
    validate_well_dimensions,
    validate_ansatz_parameters,
    validate_h_grid,
    validate_threshold_window,
    validate_triangle,
    validate_normalized,
)


def test_validate_mesh_size():
    """Test mesh size validation."""
    assert validate_mesh_size(None) == False
    assert validate_mesh_size(1) == True
    assert validate_mesh_size(2000) == True
    assert validate_mesh_size(0) == False


def test_validate_scaling():
    """Test scaling factor validation."""
    assert validate_scaling(None) == True
    assert validate_scaling(4.0) == True
    assert validate_scaling(0.0) == False
    assert validate_scaling(float("inf")) == False


def test_validate_well_dimensions():
    """Test the nu >= 2 rule."""
    assert validate_well_dimensions(3, 0) == True
    assert validate_well_dimensions(2, 0) == True
    assert validate_well_dimensions(1, 1) == True
    assert validate_well_dimensions(1, 0) == False
    assert validate_well_dimensions(3, -1) == False


def test_validate_ansatz_parameters():
    """Test Ansatz parameter validation."""
    assert validate_ansatz_parameters(1.0, 0.1, 0.5) == True
    assert validate_ansatz_parameters(-3.0, 0.0, 0.2) == True
    assert validate_ansatz_parameters(1.0, -0.1, 0.5) == False
    assert validate_ansatz_parameters(1.0, 0.2, -0.2) == False
    assert validate_ansatz_parameters(float("nan"), 0.1, 0.5) == False


def test_validate_h_grid():
    """Test scaling grid validation."""
    assert validate_h_grid([1.0, 1.5, 2.25]) == True
    assert validate_h_grid([]) == False
    assert validate_h_grid([1.0, 1.0]) == False
    assert validate_h_grid([-1.0, 2.0]) == False


def test_validate_threshold_window():
    """Test threshold window validation."""
    assert validate_threshold_window((1e-3, 0.3)) == True
    assert validate_threshold_window((0.3, 1e-3)) == False
    assert validate_threshold_window((0.0, 0.3)) == False
    assert validate_threshold_window(None) == False


def test_validate_triangle():
    """Test triangle inequality validation."""
    assert validate_triangle(1.0, 1.0, 0.0) == True
    assert validate_triangle(1.0, 2.0, 3.0) == True
    assert validate_triangle(1.0, 2.0, 0.5) == False
    assert validate_triangle(1.0, 2.0, 3.5) == False


def test_validate_normalized():
    """Test coefficient normalization validation."""
    assert validate_normalized([0.6, 0.8]) == True
    assert validate_normalized([1.0, 1.0]) == False
    assert validate_normalized([]) == False
