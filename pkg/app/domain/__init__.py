"""
Domain package: geometry value types, primitives and errors
"""

from .errors import CapacityError, EpsHullError, InvalidInputError, NumericFailureError, StreamFormatError
from .models import DyadicAngle, Direction, Hull2D, Orientation, Point

__all__ = [
    "CapacityError",
    "EpsHullError",
    "InvalidInputError",
    "NumericFailureError",
    "StreamFormatError",
    "DyadicAngle",
    "Direction",
    "Hull2D",
    "Orientation",
    "Point",
]
