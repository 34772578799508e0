"""Common response schemas."""
from pydantic import BaseModel
from typing import Any, Optional


class ErrorResponse(BaseModel):
    """Unified error body."""
    code: str
    message: str
    trace_id: str
    details: Optional[Any] = None


class FitResponse(BaseModel):
    """Least-squares fit of log₂ values against k."""
    slope: float
    intercept: float
    r2: float
