"""Dependencies for FastAPI."""
from fastapi import Depends
from sqlalchemy.orm import Session
from inclab.db.session import get_db
from inclab.services.surface_service import SurfaceService
from inclab.services.configuration_service import ConfigurationService
from inclab.services.incidence_service import IncidenceService
from inclab.services.spacing_service import SpacingService
from inclab.services.sweep_service import SweepService
from inclab.services.furstenberg_service import FurstenbergService
from inclab.services.sumproduct_service import SumProductService


def get_surface_service() -> SurfaceService:
    return SurfaceService()


def get_configuration_service() -> ConfigurationService:
    return ConfigurationService()


def get_incidence_service() -> IncidenceService:
    return IncidenceService()


def get_spacing_service() -> SpacingService:
    return SpacingService()


def get_sweep_service(db: Session = Depends(get_db)) -> SweepService:
    """Get sweep service."""
    return SweepService(db)


def get_furstenberg_service(db: Session = Depends(get_db)) -> FurstenbergService:
    return FurstenbergService(db)


def get_sumproduct_service(db: Session = Depends(get_db)) -> SumProductService:
    return SumProductService(db)
