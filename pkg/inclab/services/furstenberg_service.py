"""Furstenberg harness service."""
from dataclasses import asdict
from typing import Optional

from sqlalchemy.orm import Session

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.experiments import FurstenbergReport, furstenberg_check
from inclab.models.sweep_run import SweepKind, SweepRun, SweepStatus
from inclab.repositories.sweep_run_repository import SweepRunRepository
from inclab.schemas.sweep import FurstenbergRequest, FurstenbergResponse, FurstenbergRowResponse
from inclab.services.sweep_service import fit_response, rows_to_json


class FurstenbergService:
    """Sweep Furstenberg configurations and product sets."""

    def __init__(self, db: Session):
        self.db = db
        self.run_repo = SweepRunRepository(db)

    def run(self, request: FurstenbergRequest) -> tuple[FurstenbergReport, Optional[SweepRun]]:
        if request.k_max < request.k_min:
            raise BusinessException(ErrorCode.INVALID_INPUT, f"k_max={request.k_max} < k_min={request.k_min}")
        report = furstenberg_check(request.u, request.v, request.k_min, request.k_max)
        run = None
        if request.persist:
            run = self.run_repo.create(
                kind=SweepKind.FURSTENBERG,
                param_1=report.u,
                param_2=report.v,
                k_min=request.k_min,
                k_max=request.k_max,
                slope=report.fit.slope,
                intercept=report.fit.intercept,
                r2=report.fit.r2,
                predicted=report.bound,
                status=SweepStatus.PASSED if report.passed else SweepStatus.FAILED,
                rows_json=rows_to_json(report.rows),
            )
        return report, run

    def to_response(self, report: FurstenbergReport, run: Optional[SweepRun] = None) -> FurstenbergResponse:
        return FurstenbergResponse(
            run_id=run.id if run else None,
            u=report.u,
            v=report.v,
            bound=report.bound,
            fit=fit_response(report.fit),
            product_fit=fit_response(report.product_fit) if report.product_fit else None,
            passed=report.passed,
            rows=[FurstenbergRowResponse(**asdict(row)) for row in report.rows],
        )
