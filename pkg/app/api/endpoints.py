"""
FastAPI endpoints for the quasiboson verification service.

This module defines the REST API routes for structure-function and
P-coefficient tables, Phi family generation, and verification runs.
"""

import asyncio
import math
from typing import Any, Dict, Optional
from uuid import uuid4

from fastapi import APIRouter, Depends, Query
from pydantic import ValidationError

from app.core.errors import ConfigError
from app.core.lifespan import get_verification_service
from app.core.logging import RunIDContext, get_logger
from app.models.api_models import (
    DSFTableResponse,
    DSFTableRow,
    ErrorResponse,
    GeneratePhiRequest,
    GeneratePhiResponse,
    PTableResponse,
    PTableRow,
    VerifyResponse,
)
from app.models.config import PhiGeneratorSource, RunConfig
from app.models.dsf import DSFVariant, structure_function_adapter
from app.services import exports
from app.services.dsf import dsf_table
from app.services.phi import classify
from app.services.verify import VerificationService, full_report

router = APIRouter()
logger = get_logger(__name__)

ERROR_RESPONSES: Dict[int, Dict[str, Any]] = {
    409: {"model": ErrorResponse, "description": "Requested blocks do not fit the constituent modes"},
    422: {"model": ErrorResponse, "description": "Invalid or inconsistent configuration"},
    500: {"model": ErrorResponse, "description": "Internal server error"},
}


async def _run(service: VerificationService, func, *args):
    return await asyncio.wrap_future(service.submit(func, *args))


def _finite(value: float) -> Optional[float]:
    return None if math.isnan(value) else float(value)


@router.get(
    "/dsf/table",
    response_model=DSFTableResponse,
    summary="Tabulate a structure function",
    description="phi(n), the energies E_n and the recurrence residuals for n = 0..n_max",
    responses=ERROR_RESPONSES,
)
async def get_dsf_table(
    variant: DSFVariant = Query(..., description="Structure function family"),
    m: Optional[int] = Query(default=None, ge=1),
    q: Optional[float] = Query(default=None),
    p1: float = Query(default=0.0),
    p2: float = Query(default=0.0),
    p3: float = Query(default=0.0),
    n_max: int = Query(default=10, ge=0, le=200),
    service: VerificationService = Depends(get_verification_service),
) -> DSFTableResponse:
    """Tabulate one of the closed-form structure functions."""
    raw: Dict[str, Any] = {"variant": variant.value}
    if m is not None:
        raw["m"] = m
    if q is not None:
        raw["q"] = q
    if variant == DSFVariant.PARAMETERIZED:
        raw.update(p1=p1, p2=p2, p3=p3)
    try:
        spec = structure_function_adapter.validate_python(raw)
    except ValidationError as e:
        fields = [".".join(str(part) for part in err["loc"]) for err in e.errors()]
        raise ConfigError("invalid structure function parameters", fields=fields) from e

    frame = await _run(service, dsf_table, spec, n_max)
    rows = [
        DSFTableRow(**{key: (_finite(value) if key != "n" else int(value)) for key, value in record.items()})
        for record in frame.to_dict(orient="records")
    ]
    logger.info("Structure function table served", variant=variant.value, n_max=n_max)
    return DSFTableResponse(success=True, message="Structure function tabulated", variant=variant, rows=rows)


@router.get(
    "/ptable",
    response_model=PTableResponse,
    summary="Exact P-coefficient table",
    responses=ERROR_RESPONSES,
)
async def get_ptable(
    n_max: int = Query(..., ge=1, le=40),
    service: VerificationService = Depends(get_verification_service),
) -> PTableResponse:
    frame = await _run(service, exports.ptable_frame, n_max)
    rows = [PTableRow(**{key: int(value) for key, value in record.items()}) for record in frame.to_dict(orient="records")]
    return PTableResponse(success=True, message="P-table built", n_max=n_max, rows=rows)


@router.post(
    "/phi/generate",
    response_model=GeneratePhiResponse,
    summary="Generate a Phi family",
    description="Block-unitary, nondegenerate unitary or one-hot families, seeded for reproducibility",
    responses=ERROR_RESPONSES,
)
async def generate_phi(request: GeneratePhiRequest) -> GeneratePhiResponse:
    """
    Generate a family and classify it against its constituent deformation.

    Raises:
        EmptySolutionError: If n_modes * m exceeds min(d_a, d_b)
    """
    source = PhiGeneratorSource(
        kind=request.kind,
        m=request.m,
        n_modes=request.n_modes,
        seed=request.seed,
        positions=[tuple(p) for p in request.positions],
    )
    family = exports.generate_from_source(source, request.d_a, request.d_b, request.q)
    verdict = classify(family, q=request.q)
    logger.info("Phi family generated", modes=len(family), f=family.f, verdict=verdict.verdict)
    return GeneratePhiResponse(
        success=True,
        message="Phi family generated",
        family=family.to_file(),
        f=family.f,
        verdict=verdict,
    )


@router.post(
    "/verify",
    response_model=VerifyResponse,
    summary="Verify a run configuration",
    description="Run every applicable suite and return the full report; success mirrors the verdict",
    responses=ERROR_RESPONSES,
)
async def verify(
    config: RunConfig,
    service: VerificationService = Depends(get_verification_service),
) -> VerifyResponse:
    """Run full_report for the posted configuration on the worker pool."""
    request_id = str(uuid4())

    with RunIDContext(request_id):
        logger.info("Verification requested", n_max=config.n_max, q=config.space.q)
        family = exports.build_family(config)
        report = await _run(service, full_report, config, family)
        passed = report.verdict == "pass"
        logger.info("Verification completed", verdict=report.verdict, failures=len(report.failures))
        return VerifyResponse(
            success=passed,
            message="All relations hold" if passed else "Some relations fail",
            report=report,
            failures=report.failures,
            request_id=request_id,
        )
