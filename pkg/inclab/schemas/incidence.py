"""Incidence schemas."""
from typing import Literal, Optional
from pydantic import BaseModel, Field
from inclab.schemas.configuration import ConfigurationPayload


class CountRequest(BaseModel):
    configuration: ConfigurationPayload
    method: Literal["grid", "brute"] = "grid"
    include_vectors: bool = False


class IncidenceReportResponse(BaseModel):
    """Totals, with per-object vectors behind include_vectors."""
    total: int
    method: str
    elapsed: float
    n_balls: int
    n_tubes: int
    per_tube: Optional[list[int]] = None
    per_ball: Optional[list[int]] = None


class ThickenRequest(BaseModel):
    configuration: ConfigurationPayload
    S: int = Field(..., ge=1)
