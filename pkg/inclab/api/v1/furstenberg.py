"""Furstenberg harness endpoints."""
from fastapi import APIRouter, Depends
from inclab.schemas.sweep import FurstenbergRequest, FurstenbergResponse
from inclab.services.furstenberg_service import FurstenbergService
from inclab.dependencies import get_furstenberg_service

router = APIRouter(prefix="/furstenberg", tags=["Furstenberg"])


@router.post("", response_model=FurstenbergResponse)
def check_furstenberg(
    request: FurstenbergRequest,
    furstenberg_service: FurstenbergService = Depends(get_furstenberg_service)
):
    """Sweep (u, v)-configurations and compare the ball-count slope with the lower bound."""
    report, run = furstenberg_service.run(request)
    return furstenberg_service.to_response(report, run)
