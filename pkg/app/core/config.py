"""
Configuration management using Pydantic Settings.

This module provides centralized configuration management with
environment variable loading and validation. Numerical tolerances
live here so that the CLI, the HTTP surface and the tests agree on them.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.

    Uses Pydantic Settings for automatic validation and type conversion.
    Per-run overrides come from a RunConfig file and CLI flags.
    """

    # Application Configuration
    environment: str = Field(
        default="development",
        description="Application environment (development, production)"
    )
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)"
    )

    # Execution Configuration
    threads: int = Field(
        default=4,
        ge=1,
        description="Worker threads used to evaluate independent verification suites"
    )
    dimension_cap: int = Field(
        default=1_000_000,
        ge=1,
        description="Largest Fock space dimension build_space accepts"
    )

    # Numerical Tolerances
    default_tolerance: float = Field(
        default=1e-10,
        gt=0,
        description="Relative residual tolerance for weak equalities"
    )
    strong_tolerance: float = Field(
        default=1e-12,
        gt=0,
        description="Tolerance for exact matrix identities and constraint systems"
    )
    rank_tolerance: float = Field(
        default=1e-9,
        gt=0,
        description="Gram eigenvalue cut, relative to the largest eigenvalue of a ladder level"
    )
    one_hot_tolerance: float = Field(
        default=1e-9,
        gt=0,
        description="Entries below this fraction of the largest entry count as zero"
    )
    unitarity_tolerance: float = Field(
        default=1e-10,
        gt=0,
        description="Allowed deviation of generator inputs from unitarity"
    )

    # Reporting Configuration
    report_timing: bool = Field(
        default=False,
        description="Include wall-clock seconds in serialized reports"
    )

    class Config:
        """Pydantic configuration."""
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "QB_"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached application settings.

    Uses lru_cache to ensure settings are loaded only once
    and reused across the application lifecycle.

    Returns:
        Settings: Application configuration object
    """
    return Settings()
