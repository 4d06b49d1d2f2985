"""
Toolkit configuration and numeric policy settings
"""
from functools import lru_cache
from typing import Tuple, Type

from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class Settings(BaseSettings):
    """Numeric policy and capacity settings shared by every service"""

    PROJECT_NAME: str = "epshull-streams"

    # Geometry tolerances
    ORIENTATION_RTOL: float = 1e-12
    CHECKER_SLACK: float = 1e-9
    ND_DISTANCE_TOL: float = 1e-10
    ND_MAX_ITERATIONS: int = 100_000

    # Oracle capacities
    OPT_BRUTE_FORCE_LIMIT: int = 18
    OPT_BOUNDARY_LIMIT: int = 512

    # Direction sampling
    SPHERE_MIN_NORM: float = 1e-8
    SKETCH_CONSTANT_C: float = 1.0
    BAD_FRACTION_CHUNK: int = 4096

    # Lower-bound construction
    LOWER_BOUND_SIZE_CAP: int = 1_000_000
    LOWER_BOUND_SAFETY: float = 0.99
    POLYGON_RADIUS: float = 0.49
    FAN_BULGE: float = 0.4

    # Streaming drivers
    MULTIPASS_MAX_PASSES: int = 64
    STREAM_CHUNK_SIZE: int = 1024

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True

    model_config = SettingsConfigDict(case_sensitive=True, extra="ignore")

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # Flags only: defaults plus explicit keyword overrides
        return (init_settings,)


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


settings = get_settings()
