"""
Pydantic model for benchmark and run result rows
"""
import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


OptMethod = Literal["brute", "boundary_brute", "constructive", "none"]
RowStatus = Literal["ok", "fail", "error", "summary"]

# Fixed CSV column order
RESULT_COLUMNS: List[str] = [
    "algo", "n", "d", "eps", "delta", "gamma", "k", "seed",
    "passes", "stored_final", "stored_peak",
    "opt_estimate", "opt_method",
    "is_eps_hull", "max_violation", "bad_fraction",
    "wall_ms", "mode", "status", "notes",
]


class ResultRow(BaseModel):
    """One run of one algorithm on one stream"""
    algo: str
    n: int = Field(0, ge=0)
    d: int = Field(0, ge=0)
    eps: Optional[float] = Field(None, ge=0.0)
    delta: Optional[float] = None
    gamma: Optional[float] = None
    k: Optional[int] = None
    seed: Optional[int] = None
    passes: Optional[int] = None
    stored_final: Optional[int] = None
    stored_peak: Optional[int] = None
    opt_estimate: Optional[int] = None
    opt_method: OptMethod = "none"
    is_eps_hull: Optional[bool] = None
    max_violation: Optional[float] = None
    bad_fraction: Optional[float] = Field(None, ge=0.0, le=1.0)
    wall_ms: float = Field(0.0, ge=0.0)
    mode: str = ""
    status: RowStatus = "ok"
    notes: str = ""

    # Slack the validity flag was decided with; not a CSV column
    checker_slack: float = Field(1e-9, ge=0.0, exclude=True)

    @model_validator(mode="after")
    def check_validity_flag(self):
        if self.is_eps_hull is None or self.max_violation is None or self.eps is None:
            return self
        expected = self.max_violation <= self.eps + self.checker_slack
        if math.isnan(self.max_violation) or expected != self.is_eps_hull:
            raise ValueError(
                f"is_eps_hull={self.is_eps_hull} disagrees with max_violation={self.max_violation} "
                f"at eps={self.eps}"
            )
        return self

    def to_record(self) -> Dict[str, Any]:
        """Row values in CSV column order"""
        data = self.model_dump()
        return {column: data[column] for column in RESULT_COLUMNS}
