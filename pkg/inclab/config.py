"""
Application configuration.

Defaults are sized for desk-scale experiments.
Long sweeps should raise the guards through environment variables.
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True)

    # Environment
    # development: local usage
    # test: used by unit tests (fresh sqlite database per test)
    # production: long-running service
    APP_ENV: str = Field(default="development", validation_alias="APP_ENV")

    # Database (sweep run ledger)
    DATABASE_URL: str = Field(default="sqlite+pysqlite:///./inclab.db", validation_alias="DATABASE_URL")

    # Size guards
    INCLAB_MAX_OBJECTS: int = Field(default=1_000_000, validation_alias="INCLAB_MAX_OBJECTS")
    INCLAB_MAX_K: int = Field(default=24, validation_alias="INCLAB_MAX_K")
    INCLAB_BRUTE_LIMIT: int = Field(default=10_000, validation_alias="INCLAB_BRUTE_LIMIT")
    INCLAB_PAIR_LIMIT: int = Field(default=100_000_000, validation_alias="INCLAB_PAIR_LIMIT")

    # Relative tolerance for every geometric predicate
    INCLAB_TOLERANCE: float = Field(default=1e-12, validation_alias="INCLAB_TOLERANCE")

    # Worker threads for counting and sweeps (0 = machine parallelism)
    INCLAB_THREADS: int = Field(default=0, validation_alias="INCLAB_THREADS")

    # Logging
    LOG_LEVEL: str = Field(default="INFO", validation_alias="LOG_LEVEL")
    INCLAB_ENGINE_LOG_LEVEL: Optional[str] = Field(default=None, validation_alias="INCLAB_ENGINE_LOG_LEVEL")


settings = Settings()
