"""Spacing profile endpoints."""
from fastapi import APIRouter, Depends
from inclab.schemas.configuration import ConfigurationPayload
from inclab.schemas.spacing import DegreeResponse, ProfileRequest, SpacingProfileResponse
from inclab.services.spacing_service import SpacingService
from inclab.dependencies import get_spacing_service

router = APIRouter(prefix="/spacing", tags=["Spacing"])


@router.post("/profile", response_model=SpacingProfileResponse)
def measure_profile(
    request: ProfileRequest,
    spacing_service: SpacingService = Depends(get_spacing_service)
):
    """Per-level maximum counts and the implied spacing constant."""
    return spacing_service.profile_response(request)


@router.post("/degrees", response_model=DegreeResponse)
def measure_degrees(
    configuration: ConfigurationPayload,
    spacing_service: SpacingService = Depends(get_spacing_service)
):
    """Overlap degrees and greedy color-class counts."""
    return spacing_service.degrees(configuration.to_configuration())
