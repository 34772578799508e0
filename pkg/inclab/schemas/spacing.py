"""Spacing profile schemas."""
from typing import Literal
from pydantic import BaseModel, Field
from inclab.schemas.configuration import ConfigurationPayload


class ProfileRequest(BaseModel):
    """Measure the spacing constant of a configuration's balls or tubes."""
    configuration: ConfigurationPayload
    target: Literal["balls", "tubes"]
    s: float = Field(..., ge=0, le=2)
    mode: Literal["dyadic", "brute", "net"] = "dyadic"


class LevelRecordResponse(BaseModel):
    level_n: int
    w: float
    max_count: int
    implied_K: float
    witness: str


class SpacingProfileResponse(BaseModel):
    kind: str
    k: int
    exponent: float
    K: float
    levels: list[LevelRecordResponse]


class DegreeResponse(BaseModel):
    max_ball_degree: int
    max_tube_degree: int
    ball_classes: int
    tube_classes: int
