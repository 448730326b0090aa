"""
FastAPI lifespan management for resource lifecycle control.

This module handles application startup and shutdown events,
managing the worker pool verification requests run on.
"""

from contextlib import asynccontextmanager
from typing import AsyncGenerator, Optional

from fastapi import FastAPI

from app.core.config import get_settings
from app.core.logging import get_logger, setup_logging
from app.services.verify import VerificationService

# Initialize logging first
setup_logging()
logger = get_logger(__name__)

# Global service instance
_verification_service: Optional[VerificationService] = None

settings = get_settings()


async def startup_event() -> None:
    """
    Initialize the verification worker pool during application startup.

    Called before the application starts accepting requests.
    """
    global _verification_service

    logger.info("Starting quasiboson verification service")

    try:
        _verification_service = VerificationService(threads=settings.threads)
        _verification_service.initialize()

        logger.info(
            "Service startup completed successfully",
            environment=settings.environment,
            log_level=settings.log_level,
            threads=settings.threads,
            dimension_cap=settings.dimension_cap,
        )

    except Exception as e:
        logger.error("Failed to start service", error=str(e), exc_info=True)
        raise


async def shutdown_event() -> None:
    """
    Drain and close the worker pool during application shutdown.
    """
    global _verification_service

    logger.info("Starting quasiboson verification service shutdown")

    try:
        if _verification_service:
            _verification_service.close()
            _verification_service = None

        logger.info("Service shutdown completed successfully")

    except Exception as e:
        logger.error("Error during service shutdown", error=str(e), exc_info=True)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator[None, None]:
    """
    FastAPI lifespan context manager.

    Args:
        app: FastAPI application instance

    Yields:
        None: Control is yielded to the application runtime
    """
    await startup_event()

    try:
        yield
    finally:
        await shutdown_event()


def get_verification_service() -> VerificationService:
    """
    Get the global verification service instance.

    Used as a dependency in FastAPI routes.

    Returns:
        VerificationService: Initialized service

    Raises:
        RuntimeError: If the service is not initialized
    """
    if _verification_service is None:
        raise RuntimeError("Verification service not initialized. Check application startup.")

    return _verification_service
