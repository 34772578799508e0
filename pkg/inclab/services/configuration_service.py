"""Configuration generation service."""
import logging
from inclab.engine.constructions import construct
from inclab.engine.geometry import Configuration
from inclab.schemas.configuration import ConfigurationPayload, GenerateRequest


logger = logging.getLogger(__name__)


class ConfigurationService:
    """Build extremal configurations."""

    def generate(self, request: GenerateRequest) -> Configuration:
        overrides = {"lam": request.lam} if request.lam is not None else {}
        config = construct(request.construction, request.k, request.alpha, request.beta, **overrides)
        logger.info(
            "generated construction %d at k=%d: |P|=%d |T|=%d",
            request.construction, request.k, config.n_balls, config.n_tubes,
        )
        return config

    def generate_payload(self, request: GenerateRequest) -> ConfigurationPayload:
        return ConfigurationPayload.from_configuration(self.generate(request))
