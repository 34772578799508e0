"""Spacing profile service."""
from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.geometry import Configuration
from inclab.engine.incidence import color_partition_balls, color_partition_tubes
from inclab.engine.spacing import SpacingProfile, ball_profile_brute, ball_profile_dyadic, tube_profile
from inclab.schemas.spacing import DegreeResponse, LevelRecordResponse, ProfileRequest, SpacingProfileResponse


class SpacingService:
    """Measure spacing constants and overlap degrees."""

    def profile(self, config: Configuration, target: str, s: float, mode: str = "dyadic") -> SpacingProfile:
        if target == "balls":
            if mode == "dyadic":
                return ball_profile_dyadic(config.ball_centers, config.scale, s)
            if mode == "brute":
                return ball_profile_brute(config.ball_centers, config.scale, s)
        elif target == "tubes":
            if mode in ("net", "dyadic"):
                return tube_profile(config.tube_params, config.scale, s, mode="net")
            if mode == "brute":
                return tube_profile(config.tube_params, config.scale, s, mode="brute")
        raise BusinessException(ErrorCode.INVALID_INPUT, f"no {mode!r} profile for {target!r}")

    def profile_response(self, request: ProfileRequest) -> SpacingProfileResponse:
        config = request.configuration.to_configuration()
        profile = self.profile(config, request.target, request.s, request.mode)
        return SpacingProfileResponse(
            kind=profile.kind,
            k=profile.scale.k,
            exponent=profile.exponent,
            K=profile.K,
            levels=[
                LevelRecordResponse(
                    level_n=lv.level_n, w=lv.w, max_count=lv.max_count, implied_K=lv.implied_K, witness=str(lv.witness)
                )
                for lv in profile.levels
            ],
        )

    def degrees(self, config: Configuration) -> DegreeResponse:
        balls = color_partition_balls(config.ball_centers, config.ball_radius)
        tubes = color_partition_tubes(config.tube_params, config.tube_width, config.tube_length)
        return DegreeResponse(
            max_ball_degree=balls.max_degree,
            max_tube_degree=tubes.max_degree,
            ball_classes=balls.n_classes,
            tube_classes=tubes.n_classes,
        )
