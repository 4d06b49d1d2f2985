"""
Pydantic models for the (eps, delta) direction sketch
"""
from pydantic import BaseModel, ConfigDict, Field


class SketchParams(BaseModel):
    """Parameters of a random-direction sketch"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1, description="Assumed bound on the optimal eps-hull size")
    delta: float = Field(..., gt=0.0, lt=1.0, description="Allowed measure of bad directions")
    gamma: float = Field(..., gt=0.0, lt=1.0, description="Allowed failure probability")
    dim: int = Field(..., ge=1)
    constant_c: float = Field(1.0, gt=0.0, description="Leading constant of the sample size")
    seed: int = 0
