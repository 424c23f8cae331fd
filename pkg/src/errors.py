# -*- coding: utf-8 -*-
"""
Exception hierarchy
Input validation errors map to exit code 2, computational failures to exit code 1
"""

from typing import Any, List, Optional, Tuple


class HSDispersionError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 1


class InputValidationError(HSDispersionError):
    """Caller supplied data that violates a precondition"""

    exit_code = 2


class ComputationError(HSDispersionError):
    """A numerical stage failed to reach its tolerance"""

    exit_code = 1


class DegenerateProfileError(InputValidationError):
    pass


class ConfigError(InputValidationError):
    pass


class SingularEvaluationError(InputValidationError):
    pass


class InfeasibleRadiiError(InputValidationError):
    pass


class ConstraintViolationError(InputValidationError):
    pass


class MixedDimensionError(InputValidationError):
    pass


class EmptyFamilyError(InputValidationError):
    pass


class PackingFormatError(InputValidationError):
    """Malformed packing file; carries the offending line and field when known"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class PackingInvariantError(InputValidationError):
    """Packing violates disjointness or radius bounds"""

    def __init__(self, message: str, pairs: Optional[List[Tuple[int, int]]] = None):
        self.pairs = list(pairs or [])
        if self.pairs:
            listed = ", ".join(f"({i}, {j})" for i, j in self.pairs[:10])
            message = f"{message}: overlapping ball pairs {listed}"
        super().__init__(message)


class QuadratureConvergenceError(ComputationError):
    pass


class SolverConvergenceError(ComputationError):
    pass


class CoverageCompleteError(ComputationError):
    pass


class SearchBudgetExceededError(ComputationError):
    """Greedy search stopped early; the partial packing is attached"""

    def __init__(self, message: str, partial: Any = None):
        self.partial = partial
        super().__init__(message)
