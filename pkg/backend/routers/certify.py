"""
Certify Router - Run bounded-depth certificates and browse stored runs
"""

from fastapi import APIRouter, Depends, HTTPException
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel
from typing import Dict, List, Optional
import logging

from ..catalog import Catalog
from ..config import settings
from ..database import Database
from ..dependencies import get_catalog, get_certifier_service, get_db, http_error
from services.certifier import CertifierService
from services.exceptions import FanforgeError, InputError
from services.formats import parse_mtx

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/certify", tags=["certify"])


class CertifyRequest(BaseModel):
    """Target N (catalog name or .mtx text), minor set, field, depth and fans"""
    N: Optional[str] = None
    N_mtx: Optional[str] = None
    S: List[str] = []
    field: int = 2
    depth: int = settings.DEPTH
    fans: Optional[List[List[str]]] = None
    fast_path: bool = True
    sample_hypotheses: bool = False


class CertifyResponse(BaseModel):
    """Stored certificate id and the machine-readable result"""
    id: int
    result: Dict


@router.post("", response_model=CertifyResponse)
async def certify(
    request: CertifyRequest,
    catalog: Catalog = Depends(get_catalog),
    service: CertifierService = Depends(get_certifier_service),
    database: Database = Depends(get_db)
):
    """Certify every class member up to the given depth, then store the result"""
    try:
        if request.N_mtx:
            N = parse_mtx(request.N_mtx)
        elif request.N:
            N = catalog.get(request.N)
        else:
            raise InputError("Give a catalog name or .mtx text for N")
        task = catalog.task(N, catalog.minor_set(request.S), request.field, request.depth,
                            fans=request.fans, N_ref=request.N, fast_path=request.fast_path,
                            sample_hypotheses=request.sample_hypotheses)
        logger.info(f"Certifying {N.name or 'N'} at depth {request.depth} over GF({request.field})")
        result = await run_in_threadpool(service.certify, task)
    except FanforgeError as e:
        raise http_error("Certification Error", e)

    data = result.to_machine()
    certificate_id = await database.save_certificate(data)
    return CertifyResponse(id=certificate_id, result=data)


@router.get("/runs")
async def list_runs(limit: int = 50, database: Database = Depends(get_db)):
    """List stored certificates, most recent first"""
    return await database.list_certificates(limit)


@router.get("/runs/{certificate_id}")
async def get_run(certificate_id: int, database: Database = Depends(get_db)):
    """Get a stored certificate"""
    certificate = await database.get_certificate(certificate_id)
    if not certificate:
        raise HTTPException(status_code=404, detail="Certificate not found")
    return certificate
