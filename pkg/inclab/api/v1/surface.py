"""Exponent surface endpoints."""
from fastapi import APIRouter, Depends, Query
from fastapi.responses import PlainTextResponse
from inclab.schemas.sweep import SurfaceResponse
from inclab.services.surface_service import SurfaceService
from inclab.dependencies import get_surface_service

router = APIRouter(prefix="/surface", tags=["Surface"])


@router.get("", response_model=SurfaceResponse)
async def get_surface(
    alpha: float = Query(..., ge=0, le=2),
    beta: float = Query(..., ge=0, le=2),
    surface_service: SurfaceService = Depends(get_surface_service)
):
    """f(α, β) with its region and the applicable upper-bound exponents."""
    return surface_service.evaluate(alpha, beta)


@router.get("/grid", response_class=PlainTextResponse)
async def get_surface_grid(
    n: int = Query(50, ge=2, le=400),
    surface_service: SurfaceService = Depends(get_surface_service)
):
    """Plot-ready CSV of f over an n × n grid."""
    return PlainTextResponse(surface_service.grid_csv(n), media_type="text/csv")
