"""
Shared dependencies for FastAPI routes
"""

from typing import Optional
from fastapi import HTTPException
import logging

from .catalog import Catalog
from .config import settings
from .database import db
from services.certifier import CertifierService
from services.exceptions import InputError, ResourceAbort, StructuralError
from services.fragility import FragilityService

logger = logging.getLogger(__name__)


# Service instances (singletons; the fragility service keeps a bounded answer cache)
_catalog: Optional[Catalog] = None
_fragility_service: Optional[FragilityService] = None
_certifier_service: Optional[CertifierService] = None


def get_catalog() -> Catalog:
    """Get catalog instance"""
    global _catalog
    if _catalog is None:
        _catalog = Catalog(max_elements=settings.MAX_ELEMENTS)
    return _catalog


def get_fragility_service() -> FragilityService:
    """Get fragility service instance"""
    global _fragility_service
    if _fragility_service is None:
        _fragility_service = FragilityService(threads=settings.THREADS)
    return _fragility_service


def get_certifier_service() -> CertifierService:
    """Get certifier service instance"""
    global _certifier_service
    if _certifier_service is None:
        _certifier_service = CertifierService(
            cap=settings.CAP,
            node_cap=settings.NODE_CAP,
            threads=settings.THREADS,
            fragility=get_fragility_service(),
        )
    return _certifier_service


async def get_db():
    """Get database connection"""
    return db


def http_error(context: str, e: Exception) -> HTTPException:
    """Log a service failure and map it to an HTTP status"""
    logger.error(f"{context}: {str(e)}")
    if isinstance(e, InputError):
        return HTTPException(status_code=400, detail=str(e))
    if isinstance(e, StructuralError):
        return HTTPException(status_code=422, detail=str(e))
    if isinstance(e, ResourceAbort):
        return HTTPException(status_code=503, detail=str(e))
    return HTTPException(status_code=500, detail=f"{context}: {str(e)}")
