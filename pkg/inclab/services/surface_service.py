"""Exponent surface service."""
from inclab.engine.experiments import f_surface, surface_grid, surface_region, theorem_exponents
from inclab.engine.serialization import surface_csv
from inclab.schemas.sweep import SurfaceResponse


class SurfaceService:
    """Evaluate f(α, β) and its plot-ready grid."""

    def evaluate(self, alpha: float, beta: float) -> SurfaceResponse:
        return SurfaceResponse(
            alpha=alpha,
            beta=beta,
            f=f_surface(alpha, beta),
            region=surface_region(alpha, beta),
            exponents=theorem_exponents(alpha, beta),
        )

    def grid_csv(self, n: int) -> str:
        return surface_csv(surface_grid(n))
