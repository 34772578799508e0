"""Configuration endpoints."""
from fastapi import APIRouter, Depends
from inclab.schemas.configuration import ConfigurationPayload, GenerateRequest
from inclab.services.configuration_service import ConfigurationService
from inclab.dependencies import get_configuration_service

router = APIRouter(prefix="/configurations", tags=["Configurations"])


@router.post("", response_model=ConfigurationPayload)
def generate_configuration(
    request: GenerateRequest,
    configuration_service: ConfigurationService = Depends(get_configuration_service)
):
    """Build construction 1-4 at scale 2^-k."""
    return configuration_service.generate_payload(request)
