"""
Errors and Status Codes

Exception hierarchy shared by all fusionkit modules, plus the solver status
enum used by result dataclasses.
"""

from enum import Enum
from typing import Optional


class FusionError(Exception):
    """Base class for all fusionkit errors"""


class DomainError(FusionError, ValueError):
    """Input lies outside the domain of an operation"""


class DimensionError(FusionError, ValueError):
    """Length or shape mismatch between arguments"""


class SolverError(FusionError, RuntimeError):
    """Numerical procedure could not produce a usable result"""


class InputFormatError(FusionError, ValueError):
    """Malformed input file, with position diagnostics"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
