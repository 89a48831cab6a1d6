"""
Fragility Router - S-fragility reports and hypothesis checks
"""

from fastapi import APIRouter, Depends
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel
from typing import List, Optional
import logging

from ..catalog import Catalog
from ..dependencies import get_catalog, get_fragility_service, http_error
from services.exceptions import FanforgeError, InputError
from services.formats import as_matroid, parse_mtx
from services.fragility import FragilityService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/fragility", tags=["fragility"])


class FragilityRequest(BaseModel):
    """A matroid (catalog name or .mtx text) and the minor set S"""
    matroid: Optional[str] = None
    mtx: Optional[str] = None
    S: List[str]


class VerdictItem(BaseModel):
    label: str
    deletion_keeps: bool
    contraction_keeps: bool


class FragilityResponse(BaseModel):
    """Per-element verdicts and the summary"""
    matroid: str
    has_minor: bool
    fragile: bool
    verdicts: List[VerdictItem]
    lines: List[str]


class HypothesesRequest(BaseModel):
    """Target N (catalog name or .mtx text) and an optional minor set S"""
    N: Optional[str] = None
    mtx: Optional[str] = None
    S: List[str] = []


class HypothesesResponse(BaseModel):
    ok: bool
    problems: List[str]
    lines: List[str]


def load(catalog: Catalog, name: Optional[str], mtx: Optional[str]):
    """Resolve a request matroid from its catalog name or inline .mtx text"""
    if mtx:
        return as_matroid(parse_mtx(mtx))
    if not name:
        raise InputError("Give a catalog name or .mtx text")
    return catalog.matroid(name)


@router.post("/check", response_model=FragilityResponse)
async def check_fragility(
    request: FragilityRequest,
    catalog: Catalog = Depends(get_catalog),
    service: FragilityService = Depends(get_fragility_service)
):
    """Report, per element, whether deletion and contraction keep an S-minor"""
    try:
        M = load(catalog, request.matroid, request.mtx)
        S = catalog.minor_set(request.S)
        report = await run_in_threadpool(service.is_S_fragile, M, S)
        return FragilityResponse(
            matroid=request.matroid or M.name or "matroid",
            has_minor=report.has_minor,
            fragile=report.fragile,
            verdicts=[VerdictItem(label=v.label, deletion_keeps=v.deletion_keeps,
                                  contraction_keeps=v.contraction_keeps) for v in report.verdicts],
            lines=report.lines(),
        )
    except FanforgeError as e:
        raise http_error("Fragility Check Error", e)


@router.post("/hypotheses", response_model=HypothesesResponse)
async def check_hypotheses(
    request: HypothesesRequest,
    catalog: Catalog = Depends(get_catalog),
    service: FragilityService = Depends(get_fragility_service)
):
    """Check the hypotheses of the fan-extension theorem for N and S"""
    try:
        N = load(catalog, request.N, request.mtx)
        S = catalog.minor_set(request.S)
        report = await run_in_threadpool(service.check_hypotheses, N, S)
        return HypothesesResponse(ok=report.ok, problems=report.problems, lines=report.lines())
    except FanforgeError as e:
        raise http_error("Hypothesis Check Error", e)
