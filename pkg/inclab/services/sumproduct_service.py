"""Sum-product harness service."""
from dataclasses import asdict
from typing import Optional

from sqlalchemy.orm import Session

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.experiments import SumProductSweep, sumproduct_inputs, sumproduct_sweep
from inclab.engine.sumproduct import SumProductReport, build_instance, verify_instance
from inclab.models.sweep_run import SweepKind, SweepRun, SweepStatus
from inclab.repositories.sweep_run_repository import SweepRunRepository
from inclab.schemas.sweep import (
    StructuralReportResponse,
    SumProductRequest,
    SumProductResponse,
    SumProductRowResponse,
)
from inclab.services.sweep_service import fit_response, rows_to_json


class SumProductService:
    """Sum-product sweeps with optional exact structural checks."""

    def __init__(self, db: Session):
        self.db = db
        self.run_repo = SweepRunRepository(db)

    def verify(self, kind: str, k: int, s: float) -> SumProductReport:
        A, B, C = sumproduct_inputs(kind, k, s)
        s = 1.0 if kind == "ap" else s
        return verify_instance(build_instance(k, A, B, C, u=s, v=s, v_prime=s), structural=True)

    def run(self, request: SumProductRequest) -> tuple[SumProductSweep, Optional[SumProductReport], Optional[SweepRun]]:
        if request.k_max < request.k_min:
            raise BusinessException(ErrorCode.INVALID_INPUT, f"k_max={request.k_max} < k_min={request.k_min}")
        result = sumproduct_sweep(request.kind, request.k_min, request.k_max, request.s)
        structural = None
        if request.structural_k is not None:
            structural = self.verify(request.kind, request.structural_k, request.s)
        run = None
        if request.persist:
            run = self.run_repo.create(
                kind=SweepKind.SUMPRODUCT,
                construction=request.kind,
                param_1=result.s,
                param_2=result.s,
                param_3=result.s,
                k_min=request.k_min,
                k_max=request.k_max,
                slope=result.lhs_fit.slope,
                intercept=result.lhs_fit.intercept,
                r2=result.lhs_fit.r2,
                predicted=result.rhs_fit.slope,
                status=SweepStatus.PASSED if result.passed else SweepStatus.FAILED,
                rows_json=rows_to_json(result.rows),
            )
        return result, structural, run

    def to_response(self, result: SumProductSweep, structural: Optional[SumProductReport] = None,
                    run: Optional[SweepRun] = None) -> SumProductResponse:
        structural_response = None
        if structural is not None:
            data = asdict(structural)
            data.pop("checks", None)
            structural_response = StructuralReportResponse(**data, ok=structural.ok)
        return SumProductResponse(
            run_id=run.id if run else None,
            kind=result.kind,
            s=result.s,
            lhs_fit=fit_response(result.lhs_fit),
            rhs_fit=fit_response(result.rhs_fit),
            predicted=result.predicted,
            passed=result.passed,
            rows=[SumProductRowResponse(**asdict(row)) for row in result.rows],
            structural=structural_response,
        )
