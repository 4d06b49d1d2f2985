"""
Pydantic models for parameters, stream specs and result rows
"""

from .results import RESULT_COLUMNS, ResultRow
from .sketch import SketchParams
from .streams import LowerBoundMetadata, StreamSpec

__all__ = ["RESULT_COLUMNS", "ResultRow", "SketchParams", "LowerBoundMetadata", "StreamSpec"]
