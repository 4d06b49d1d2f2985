"""
Error types raised by the geometry layer, the oracles and the streaming algorithms
"""
from typing import Optional


class EpsHullError(Exception):
    """Base class for every error raised by the toolkit"""


class InvalidInputError(EpsHullError, ValueError):
    """A precondition on the inputs does not hold"""


class StreamFormatError(InvalidInputError):
    """A point-stream file could not be parsed"""

    def __init__(self, message: str, path: Optional[str] = None, line_number: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line_number}: " if line_number is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line_number = line_number


class CapacityError(EpsHullError):
    """An exponential search or a generator would exceed its configured size limit"""

    def __init__(self, limit_name: str, limit: int, actual: int):
        super().__init__(f"{limit_name} exceeded: {actual} > {limit}")
        self.limit_name = limit_name
        self.limit = limit
        self.actual = actual


class NumericFailureError(EpsHullError, ArithmeticError):
    """An iterative method hit its iteration cap before certifying its result"""

    def __init__(self, message: str, best_bound: float):
        super().__init__(f"{message} (best bound {best_bound:.3e})")
        self.best_bound = best_bound
