"""Incidence counting service."""
from inclab.engine.incidence import count, thicken
from inclab.schemas.configuration import ConfigurationPayload
from inclab.schemas.incidence import CountRequest, IncidenceReportResponse, ThickenRequest


class IncidenceService:
    """Count incidences of posted configurations."""

    def count(self, request: CountRequest) -> IncidenceReportResponse:
        config = request.configuration.to_configuration()
        config.check_size()
        report = count(config, request.method)
        return IncidenceReportResponse(**report.to_dict(include_vectors=request.include_vectors))

    def thicken(self, request: ThickenRequest) -> ConfigurationPayload:
        config = thicken(request.configuration.to_configuration(), request.S)
        return ConfigurationPayload.from_configuration(config)
