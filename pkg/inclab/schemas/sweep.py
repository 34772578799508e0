"""Sweep and harness schemas."""
from datetime import datetime
from typing import Literal, Optional
from pydantic import BaseModel, Field
from inclab.models.sweep_run import SweepKind, SweepStatus
from inclab.schemas.common import FitResponse


class SweepRequest(BaseModel):
    """Sweep one construction over k_min..k_max."""
    construction: int = Field(..., ge=1, le=4)
    alpha: float = Field(..., ge=0, le=2)
    beta: float = Field(..., ge=0, le=2)
    k_min: int = Field(..., ge=4)
    k_max: int = Field(..., ge=4)
    lam: Optional[float] = Field(None, ge=0, le=1)
    method: Literal["grid", "brute"] = "grid"
    profiles: bool = True
    persist: bool = True


class SweepRowResponse(BaseModel):
    k: int
    D: int
    alpha: float
    beta: float
    n_balls: int
    n_tubes: int
    I: int
    K_alpha_meas: Optional[float] = None
    K_beta_meas: Optional[float] = None
    seconds: float
    bound_ratios: dict[str, float] = Field(default_factory=dict)


class SweepResultResponse(BaseModel):
    run_id: Optional[int] = None
    construction: int
    alpha: float
    beta: float
    fit: FitResponse
    predicted: float
    passed: bool
    bound_slopes: dict[str, float] = Field(default_factory=dict)
    rows: list[SweepRowResponse]


class SweepRunResponse(BaseModel):
    """Persisted sweep run."""
    id: int
    kind: SweepKind
    construction: Optional[str]
    param_1: float
    param_2: Optional[float]
    param_3: Optional[float]
    k_min: int
    k_max: int
    slope: float
    intercept: float
    r2: float
    predicted: Optional[float]
    status: SweepStatus
    rows_json: str
    created_at: datetime

    class Config:
        from_attributes = True


class FurstenbergRequest(BaseModel):
    u: float = Field(..., gt=0, le=1)
    v: float = Field(..., ge=1, le=2)
    k_min: int = Field(..., ge=1)
    k_max: int = Field(..., ge=1)
    persist: bool = False


class FurstenbergRowResponse(BaseModel):
    k: int
    n_tubes: int
    n_balls: int
    sum_pt: int
    max_pt_K: float
    general_ratio: float


class FurstenbergResponse(BaseModel):
    run_id: Optional[int] = None
    u: float
    v: float
    bound: float
    fit: FitResponse
    product_fit: Optional[FitResponse] = None
    passed: bool
    rows: list[FurstenbergRowResponse]


class SumProductRequest(BaseModel):
    kind: Literal["ap", "cantor"] = "ap"
    s: float = Field(1.0, gt=0, le=1)
    k_min: int = Field(..., ge=2)
    k_max: int = Field(..., ge=2)
    structural_k: Optional[int] = Field(None, ge=2, description="Also run the exact structural checks at this k")
    persist: bool = False


class SumProductRowResponse(BaseModel):
    k: int
    n_A: int
    n_B: int
    n_C: int
    n_X: int
    n_Y: int
    lhs: int
    rhs: float


class StructuralReportResponse(BaseModel):
    n_tubes_ok: bool
    size_ok: bool
    families_meet_tubes: Optional[bool]
    max_cover_distance: Optional[float]
    max_family_K: Optional[float]
    family_K_bound: float
    lhs: int
    rhs: float
    ratio: float
    incidences: Optional[int]
    ok: bool


class SumProductResponse(BaseModel):
    run_id: Optional[int] = None
    kind: str
    s: float
    lhs_fit: FitResponse
    rhs_fit: FitResponse
    predicted: float
    passed: bool
    rows: list[SumProductRowResponse]
    structural: Optional[StructuralReportResponse] = None


class SurfaceResponse(BaseModel):
    alpha: float
    beta: float
    f: float
    region: str
    exponents: dict[str, float] = Field(default_factory=dict)
