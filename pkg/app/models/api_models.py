"""
API request and response models for the quasiboson verification service.

This module defines Pydantic models for the HTTP endpoints including
request validation, response envelopes, and error handling.
"""

from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.models.config import GeneratorKind
from app.models.dsf import DSFVariant
from app.models.phi import PhiFamilyFile, RealizabilityVerdict
from app.models.report import VerificationReport


class ServiceStatus(str, Enum):
    """Service health status values."""
    OPERATIONAL = "operational"
    DEGRADED = "degraded"
    DOWN = "down"


# Request Models

class GeneratePhiRequest(BaseModel):
    """
    Parameters of a generated Phi family.

    Mirrors the generate-phi command; positions are 1-based.
    """

    d_a: int = Field(..., ge=1, description="Number of a-modes")
    d_b: int = Field(..., ge=1, description="Number of b-modes")
    m: int = Field(default=1, ge=1, description="Block rank, f = 2/m")
    n_modes: int = Field(default=1, ge=1, description="Number of quasiboson modes")
    seed: Optional[int] = Field(default=None, description="Seed for Haar-random unitaries")
    kind: GeneratorKind = Field(default=GeneratorKind.BLOCK)
    positions: List[List[int]] = Field(
        default_factory=list,
        description="1-based [mu, nu] one-hot positions"
    )
    q: float = Field(default=1.0, gt=-1.0, le=1.0, description="Constituent deformation")


# Response Models

class APIResponse(BaseModel):
    """
    Base response model for all API endpoints.

    Provides consistent structure for API responses including
    success/error status, timestamps, and metadata.
    """
    model_config = ConfigDict(use_enum_values=True)

    success: bool = Field(
        ...,
        description="Whether the operation was successful"
    )

    message: str = Field(
        ...,
        description="Human-readable response message"
    )

    timestamp: datetime = Field(
        default_factory=datetime.utcnow,
        description="Response timestamp in UTC"
    )

    request_id: Optional[str] = Field(
        default=None,
        description="Unique request identifier for tracing"
    )


class DSFTableRow(BaseModel):
    n: int
    phi: Optional[float] = None
    energy: Optional[float] = None
    binomial_residual: Optional[float] = None
    three_term_residual: Optional[float] = None


class DSFTableResponse(APIResponse):
    """Structure-function table."""

    variant: DSFVariant
    rows: List[DSFTableRow] = Field(default_factory=list)


class PTableRow(BaseModel):
    n: int
    k: int
    l: int
    j: int
    value: int


class PTableResponse(APIResponse):
    """Exact P-coefficient table, checked against the closed forms."""

    n_max: int
    rows: List[PTableRow] = Field(default_factory=list)


class GeneratePhiResponse(APIResponse):
    """Generated family with its classification."""

    family: PhiFamilyFile
    f: float = Field(..., description="Deformation parameter of the family")
    verdict: RealizabilityVerdict


class VerifyResponse(APIResponse):
    """Verification report of one run configuration."""

    report: VerificationReport
    failures: List[str] = Field(default_factory=list, description="suite:label of every failing relation")


# Error Models

class ErrorDetail(BaseModel):
    """
    Detailed error information.
    """

    error_code: str = Field(
        ...,
        description="Unique error code for categorization"
    )

    error_type: str = Field(
        ...,
        description="Error type classification"
    )

    message: str = Field(
        ...,
        description="Human-readable error message"
    )

    fields: Optional[List[str]] = Field(
        default=None,
        description="Configuration fields involved in the error"
    )

    details: Optional[Dict[str, Any]] = Field(
        default=None,
        description="Additional error details"
    )


class ErrorResponse(APIResponse):
    """
    Response model for API errors.
    """

    error: ErrorDetail = Field(
        ...,
        description="Detailed error information"
    )

    # Override success to always be False for error responses
    success: bool = Field(
        default=False,
        description="Always false for error responses"
    )


# Health Check Models

class ComponentHealth(BaseModel):
    """
    Health status of individual service components.
    """

    name: str = Field(..., description="Component name")
    status: ServiceStatus = Field(..., description="Component health status")
    details: Optional[Dict[str, Any]] = Field(default=None, description="Additional component details")


class HealthCheckResponse(APIResponse):
    """
    Response model for health check endpoint.
    """

    overall_status: ServiceStatus = Field(..., description="Overall service health status")
    components: List[ComponentHealth] = Field(default_factory=list)
    version: str = Field(default="1.0.0", description="Service version")
    environment: str = Field(..., description="Deployment environment")
