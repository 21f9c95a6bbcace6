# backend/app/exceptions.py
# Exception hierarchy shared by the services and the CLI

from typing import Any, Optional, Sequence

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class GaussWellError(Exception):
    """Base error carrying a human-readable detail and a CLI exit status."""

    exit_status = EXIT_NUMERICAL

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)

    def to_record(self) -> dict:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "exit_status": self.exit_status,
        }


class ConfigValidationError(GaussWellError):
    exit_status = EXIT_VALIDATION

    def __init__(self, detail: str, field: Optional[str] = None):
        self.field = field
        if field:
            detail = f"Invalid value for '{field}': {detail}"
        super().__init__(detail)


class ContractViolationError(GaussWellError):
    exit_status = EXIT_VALIDATION


class SubcriticalWellError(GaussWellError):
    exit_status = EXIT_VALIDATION

    def __init__(self, v0: float, v0_c: float):
        self.v0 = v0
        self.v0_c = v0_c
        super().__init__(
            f"Effective depth v0={v0:.6f} does not exceed the critical value {v0_c:.6f}; "
            "the well has no bound state."
        )


class MeshConvergenceError(GaussWellError):
    def __init__(self, index: int, family: str, size: int):
        self.index = index
        detail = (
            f"Root refinement for the {family} mesh of size {size} did not converge "
            f"at index {index}."
        )
        super().__init__(detail)


class EigensolverError(GaussWellError):
    def __init__(self, spec: Any, reason: str):
        self.spec = spec
        super().__init__(f"Eigensolver failed for {spec}: {reason}")


class NumericalInconsistencyError(GaussWellError):
    pass


class CriticalBracketError(GaussWellError):
    def __init__(self, bracket: Sequence[float], label: str):
        self.bracket = tuple(bracket)
        super().__init__(
            f"No sign change of the {label} energy inside the bracket "
            f"[{self.bracket[0]:.6g}, {self.bracket[1]:.6g}]."
        )


class ThresholdFitError(GaussWellError):
    def __init__(self, kind: str, condition: float):
        self.condition = condition
        super().__init__(
            f"Design matrix for the {kind} threshold fit is ill-conditioned "
            f"(condition number {condition:.3e}); the fit window is too narrow or too wide."
        )


class DegenerateSuperpositionError(GaussWellError):
    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(
            f"Overlap matrix condition number {condition:.3e} exceeds the limit; "
            "the superposition is degenerate."
        )


class ResultIOError(GaussWellError):
    exit_status = EXIT_IO

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"Failed to write results to '{path}': {reason}")
