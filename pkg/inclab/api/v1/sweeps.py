"""Sweep endpoints."""
from typing import Optional
from fastapi import APIRouter, Depends, Query
from inclab.models.sweep_run import SweepKind, SweepStatus
from inclab.schemas.sweep import SweepRequest, SweepResultResponse, SweepRunResponse
from inclab.utils.pagination import PaginatedResponse, page_window
from inclab.services.sweep_service import SweepService
from inclab.dependencies import get_sweep_service

router = APIRouter(prefix="/sweeps", tags=["Sweeps"])


@router.post("", response_model=SweepResultResponse)
def run_sweep(
    request: SweepRequest,
    sweep_service: SweepService = Depends(get_sweep_service)
):
    """Run a construction sweep and fit log₂ I against k."""
    result, run = sweep_service.run(request)
    return sweep_service.to_response(result, run)


@router.get("", response_model=PaginatedResponse[SweepRunResponse])
async def list_sweep_runs(
    kind: Optional[SweepKind] = None,
    status: Optional[SweepStatus] = None,
    page: int = Query(1, ge=1),
    page_size: int = Query(20, ge=1, le=100),
    sweep_service: SweepService = Depends(get_sweep_service)
):
    """List recorded runs, newest first."""
    skip, limit = page_window(page, page_size)
    runs, total = sweep_service.list_runs(kind, status, skip, limit)
    items = [SweepRunResponse.model_validate(run) for run in runs]
    return PaginatedResponse.create(items, total, page, page_size)


@router.get("/{run_id}", response_model=SweepRunResponse)
async def get_sweep_run(
    run_id: int,
    sweep_service: SweepService = Depends(get_sweep_service)
):
    return sweep_service.get_run(run_id)
