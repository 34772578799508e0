"""Sweep service: run construction sweeps and keep a ledger of their fits."""
import json
import logging
import math
from dataclasses import asdict
from typing import List, Optional

from sqlalchemy.orm import Session

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.experiments import FitResult, SweepResult, sweep
from inclab.models.sweep_run import SweepKind, SweepRun, SweepStatus
from inclab.repositories.sweep_run_repository import SweepRunRepository
from inclab.schemas.common import FitResponse
from inclab.schemas.sweep import SweepRequest, SweepResultResponse, SweepRowResponse


logger = logging.getLogger(__name__)


def finite_or_none(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def rows_to_json(rows) -> str:
    """Rows as JSON with non-finite floats stored as null."""
    records = [{key: finite_or_none(value) for key, value in asdict(row).items()} for row in rows]
    return json.dumps(records, sort_keys=True)


def fit_response(fit: FitResult) -> FitResponse:
    return FitResponse(slope=fit.slope, intercept=fit.intercept, r2=fit.r2)


class SweepService:
    """Sweep service."""

    def __init__(self, db: Session):
        self.db = db
        self.run_repo = SweepRunRepository(db)

    def run(self, request: SweepRequest) -> tuple[SweepResult, Optional[SweepRun]]:
        if request.k_max < request.k_min:
            raise BusinessException(ErrorCode.INVALID_INPUT, f"k_max={request.k_max} < k_min={request.k_min}")
        result = sweep(
            request.construction, request.alpha, request.beta, request.k_min, request.k_max,
            method=request.method, profiles=request.profiles, lam=request.lam,
        )
        run = self.record(result, request.k_min, request.k_max) if request.persist else None
        return result, run

    def record(self, result: SweepResult, k_min: int, k_max: int) -> SweepRun:
        run = self.run_repo.create(
            kind=SweepKind.CONSTRUCTION,
            construction=str(result.construction),
            param_1=result.alpha,
            param_2=result.beta,
            param_3=result.overrides.get("lam"),
            k_min=k_min,
            k_max=k_max,
            slope=result.fit.slope,
            intercept=result.fit.intercept,
            r2=result.fit.r2,
            predicted=result.predicted,
            status=SweepStatus.PASSED if result.passed else SweepStatus.FAILED,
            rows_json=rows_to_json(result.rows),
        )
        logger.info("recorded sweep run %d (construction %s, %s)", run.id, run.construction, run.status.value)
        return run

    def to_response(self, result: SweepResult, run: Optional[SweepRun] = None) -> SweepResultResponse:
        return SweepResultResponse(
            run_id=run.id if run else None,
            construction=result.construction,
            alpha=result.alpha,
            beta=result.beta,
            fit=fit_response(result.fit),
            predicted=result.predicted,
            passed=result.passed,
            bound_slopes=result.bound_slopes,
            rows=[
                SweepRowResponse(**{key: finite_or_none(value) for key, value in asdict(row).items()})
                for row in result.rows
            ],
        )

    def get_run(self, run_id: int) -> SweepRun:
        run = self.run_repo.get_by_id(run_id)
        if not run:
            raise BusinessException(ErrorCode.SWEEP_RUN_NOT_FOUND, f"id={run_id}")
        return run

    def list_runs(
        self,
        kind: Optional[SweepKind] = None,
        status: Optional[SweepStatus] = None,
        skip: int = 0,
        limit: int = 20
    ) -> tuple[List[SweepRun], int]:
        return self.run_repo.list_runs(kind, status, skip, limit)
