"""
Quasiboson Verification Service

HTTP surface over the composite quasiboson toolkit: structure-function and
P-coefficient tables, Phi family generation and verification runs.
"""

from datetime import datetime
from uuid import uuid4

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.api.endpoints import router
from app.core.config import get_settings
from app.core.errors import ConfigError, ContractError, DomainError, EmptySolutionError, QuasibosonError, RangeError
from app.core.lifespan import get_verification_service, lifespan
from app.core.logging import get_logger
from app.models.api_models import ComponentHealth, ErrorDetail, ErrorResponse, HealthCheckResponse, ServiceStatus

# Initialize settings
settings = get_settings()
logger = get_logger(__name__)

app = FastAPI(
    title="Quasiboson Verification Service",
    description="Realization checks for composite quasibosons built from two q-fermions",
    version="1.0.0",
    lifespan=lifespan,
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_url="/openapi.json"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"] if settings.environment == "development" else [],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(router, prefix="/api/v1")


@app.get("/")
async def root():
    """
    Root endpoint providing service information.
    """
    return {
        "service": "Quasiboson Verification Service",
        "version": "1.0.0",
        "status": "operational",
        "docs": "/docs",
        "environment": settings.environment
    }


@app.get("/health", response_model=HealthCheckResponse)
async def health_check() -> HealthCheckResponse:
    """
    Health check endpoint for monitoring and load balancers.

    The worker pool is the only component; without it /verify cannot run.
    """
    try:
        service = get_verification_service()
        pool_status = ServiceStatus.OPERATIONAL if service.running else ServiceStatus.DOWN
        threads = service.threads
    except RuntimeError:
        pool_status, threads = ServiceStatus.DOWN, 0

    overall = ServiceStatus.OPERATIONAL if pool_status == ServiceStatus.OPERATIONAL else ServiceStatus.DEGRADED
    return HealthCheckResponse(
        success=overall == ServiceStatus.OPERATIONAL,
        message="healthy" if overall == ServiceStatus.OPERATIONAL else "worker pool unavailable",
        overall_status=overall,
        components=[ComponentHealth(name="worker_pool", status=pool_status, details={"threads": threads})],
        environment=settings.environment,
    )


def _error_response(status_code: int, code: str, exc: Exception, message: str, fields=None) -> JSONResponse:
    request_id = str(uuid4())
    return JSONResponse(
        status_code=status_code,
        content=ErrorResponse(
            message=message,
            error=ErrorDetail(
                error_code=code,
                error_type=type(exc).__name__,
                message=str(exc),
                fields=fields,
            ),
            request_id=request_id,
            timestamp=datetime.utcnow()
        ).model_dump(mode="json")
    )


def status_for(exc: QuasibosonError) -> int:
    """HTTP status of a package error."""
    if isinstance(exc, EmptySolutionError):
        return 409
    if isinstance(exc, (ConfigError, DomainError, ContractError, RangeError)):
        return 422
    return 500


@app.exception_handler(QuasibosonError)
async def quasiboson_exception_handler(request: Request, exc: QuasibosonError):
    """
    Map package errors onto the error envelope.
    """
    status_code = status_for(exc)
    fields = list(exc.fields) if isinstance(exc, ConfigError) else None
    logger.warning("Request rejected", path=request.url.path, error=str(exc), status_code=status_code, fields=fields)
    return _error_response(status_code, type(exc).__name__.upper(), exc, "Request could not be processed", fields)


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    fields = [".".join(str(part) for part in err["loc"]) for err in exc.errors()]
    logger.warning("Request validation failed", path=request.url.path, fields=fields)
    return _error_response(422, "VALIDATION_ERROR", exc, "Request validation failed", fields)


@app.exception_handler(HTTPException)
async def http_exception_handler(request: Request, exc: HTTPException):
    """
    Custom handler for HTTP exceptions to provide consistent error responses.
    """
    logger.warning("HTTP exception occurred", status_code=exc.status_code, detail=exc.detail)
    return _error_response(exc.status_code, f"HTTP_{exc.status_code}", exc, "Request failed")


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    """
    Handler for unexpected exceptions to provide consistent error responses.
    """
    logger.error("Unexpected exception occurred", error_type=type(exc).__name__, error=str(exc), exc_info=True)
    return JSONResponse(
        status_code=500,
        content=ErrorResponse(
            message="An unexpected error occurred",
            error=ErrorDetail(
                error_code="INTERNAL_ERROR",
                error_type=type(exc).__name__,
                message="An internal server error occurred. Please try again later.",
            ),
            request_id=str(uuid4()),
        ).model_dump(mode="json")
    )


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "main:app",
        host="0.0.0.0",
        port=8000,
        reload=settings.environment == "development",
        log_level=settings.log_level.lower()
    )
