"""Incidence endpoints."""
from fastapi import APIRouter, Depends
from inclab.schemas.configuration import ConfigurationPayload
from inclab.schemas.incidence import CountRequest, IncidenceReportResponse, ThickenRequest
from inclab.services.incidence_service import IncidenceService
from inclab.dependencies import get_incidence_service

router = APIRouter(prefix="/incidences", tags=["Incidences"])


@router.post("/count", response_model=IncidenceReportResponse)
def count_incidences(
    request: CountRequest,
    incidence_service: IncidenceService = Depends(get_incidence_service)
):
    """Count ball-tube incidences of a posted configuration."""
    return incidence_service.count(request)


@router.post("/thicken", response_model=ConfigurationPayload)
def thicken_configuration(
    request: ThickenRequest,
    incidence_service: IncidenceService = Depends(get_incidence_service)
):
    return incidence_service.thicken(request)
