# backend/app/utils/validators.py
# Validation predicates for numerical inputs

import math
from typing import Optional, Sequence

import numpy as np

from app.utils.constants import (
    MAX_MESH_SIZE,
    NORMALIZATION_TOLERANCE,
    TRIANGLE_TOLERANCE,
)


def validate_mesh_size(size: Optional[int]) -> bool:
    """Validate mesh size is a positive integer within the supported range."""
    if size is None:
        return False
    return 1 <= size <= MAX_MESH_SIZE


def validate_scaling(h: Optional[float]) -> bool:
    """Validate mesh scaling factor if provided."""
    if h is None:
        return True
    return math.isfinite(h) and h > 0


def validate_well_dimensions(d: int, ell: int) -> bool:
    """Validate the effective dimension nu = 2*ell + d is at least 2."""
    if d < 1 or ell < 0:
        return False
    return 2 * ell + d >= 2


def validate_ansatz_parameters(a: float, b: float, s: float) -> bool:
    """Validate Ansatz parameters keep the trial normalizable."""
    if not all(math.isfinite(value) for value in (a, b, s)):
        return False
    return b >= 0 and b + s > 0


def validate_h_grid(grid: Optional[Sequence[float]]) -> bool:
    """Validate a scaling grid is positive and strictly increasing."""
    if not grid:
        return False
    values = list(grid)
    if any(not math.isfinite(h) or h <= 0 for h in values):
        return False
    return all(later > earlier for earlier, later in zip(values, values[1:]))


def validate_threshold_window(window: Optional[Sequence[float]]) -> bool:
    """Validate a (low, high) window of distances above the critical depth."""
    if not window or len(window) != 2:
        return False
    low, high = window
    return 0 < low < high


def validate_triangle(r1: float, r2: float, r12: float) -> bool:
    """Validate three radii satisfy the triangle inequality."""
    if min(r1, r2, r12) < 0:
        return False
    slack = TRIANGLE_TOLERANCE * max(1.0, r1 + r2)
    return abs(r1 - r2) - slack <= r12 <= r1 + r2 + slack


def validate_normalized(coefficients: Sequence[float]) -> bool:
    """Validate coefficient vector has unit Euclidean norm."""
    values = np.asarray(coefficients, dtype=float)
    if values.size == 0:
        return False
    return abs(float(np.dot(values, values)) - 1.0) <= NORMALIZATION_TOLERANCE
