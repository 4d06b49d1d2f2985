"""
Pydantic models for stream generation and lower-bound sidecar metadata
"""
from typing import Dict, List, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


StreamKind = Literal["circle", "disk", "square_grid", "gaussian", "ngon_boundary", "lower_bound_3d"]

PLANAR_KINDS = ("circle", "disk", "square_grid")


# ==================== STREAM SPEC ====================

class StreamSpec(BaseModel):
    """What to generate and how"""
    model_config = ConfigDict(frozen=True)

    kind: StreamKind
    n: int = Field(1, ge=1)
    seed: int = 0
    radius: float = Field(1.0, gt=0.0)
    dim: int = Field(2, ge=1)
    equally_spaced: bool = Field(True, description="circle: equal spacing instead of random angles")
    sides: int = Field(4, ge=3, description="ngon_boundary: number of polygon vertices")
    f_table: str = Field("const:1", description="lower_bound_3d: f-table preset")
    r: int = Field(2, ge=1, description="lower_bound_3d: number of fan rounds")

    @model_validator(mode="after")
    def check_dimension(self):
        if self.kind in PLANAR_KINDS and self.dim != 2:
            raise ValueError(f"{self.kind} streams are two-dimensional, got dim={self.dim}")
        if self.kind == "ngon_boundary" and self.dim not in (2, 3):
            raise ValueError(f"ngon_boundary supports dim 2 or 3, got dim={self.dim}")
        if self.kind == "ngon_boundary" and self.n < self.sides:
            raise ValueError(f"ngon_boundary needs n >= sides ({self.n} < {self.sides})")
        return self


# ==================== LOWER BOUND SIDECAR ====================

class LowerBoundMetadata(BaseModel):
    """Sidecar record written next to a lower-bound stream file"""
    f_table: str
    r: int
    eps_star: float = Field(..., gt=0.0)
    layer_boundaries: List[int]
    layer_margins: List[float]
    group_map: Dict[int, int] = Field(default_factory=dict, description="P2 stream index -> group id")
    fan_parent: Dict[int, Tuple[int, int]] = Field(
        default_factory=dict,
        description="fan point stream index -> (parent layer, parent group id)"
    )
