"""Configuration schemas: the frozen JSON format for ball/tube configurations."""
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from inclab.engine.geometry import Configuration, Scale


class BallPayload(BaseModel):
    cx: float
    cy: float


class TubePayload(BaseModel):
    cx: float
    cy: float
    theta: float = Field(..., description="Direction of the long side, radians")


class ConfigurationPayload(BaseModel):
    """
    {"k", "alpha", "beta", "construction", "balls", "tubes", "meta"}.

    Radius, width and length are δ, δ and 1 unless meta carries
    ball_radius / tube_width / tube_length.
    """
    k: int = Field(..., ge=1)
    alpha: Optional[float] = None
    beta: Optional[float] = None
    construction: Optional[Union[int, str]] = None
    balls: list[BallPayload] = Field(default_factory=list)
    tubes: list[TubePayload] = Field(default_factory=list)
    meta: dict = Field(default_factory=dict)

    @classmethod
    def from_configuration(cls, config: Configuration) -> "ConfigurationPayload":
        meta = dict(config.meta)
        delta = config.scale.delta
        if config.ball_radius != delta:
            meta["ball_radius"] = config.ball_radius
        if config.tube_width != delta:
            meta["tube_width"] = config.tube_width
        if config.tube_length != 1.0:
            meta["tube_length"] = config.tube_length
        return cls(
            k=config.scale.k,
            alpha=meta.get("alpha"),
            beta=meta.get("beta"),
            construction=meta.get("construction"),
            balls=[BallPayload(cx=float(x), cy=float(y)) for x, y in config.ball_centers],
            tubes=[TubePayload(cx=float(x), cy=float(y), theta=float(t)) for x, y, t in config.tube_params],
            meta=meta,
        )

    def to_configuration(self) -> Configuration:
        scale = Scale(self.k)
        meta = dict(self.meta)
        radius = float(meta.get("ball_radius", scale.delta))
        width = float(meta.get("tube_width", scale.delta))
        length = float(meta.get("tube_length", 1.0))
        centers = np.array([(b.cx, b.cy) for b in self.balls], dtype=float).reshape(-1, 2)
        tubes = np.array([(t.cx, t.cy, t.theta) for t in self.tubes], dtype=float).reshape(-1, 3)
        for key in ("alpha", "beta", "construction"):
            value = getattr(self, key)
            if value is not None:
                meta.setdefault(key, value)
        return Configuration(scale, centers, tubes, radius, width, length, meta)


class GenerateRequest(BaseModel):
    """Build one of the four extremal constructions."""
    construction: int = Field(..., ge=1, le=4)
    k: int = Field(..., ge=4)
    alpha: float = Field(..., ge=0, le=2)
    beta: float = Field(..., ge=0, le=2)
    lam: Optional[float] = Field(None, ge=0, le=1, description="Construction 1 row-rotation exponent override")


class ConfigurationSummary(BaseModel):
    k: int
    n_balls: int
    n_tubes: int
    construction: Optional[Union[int, str]] = None
    meta: dict = Field(default_factory=dict)
