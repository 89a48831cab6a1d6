"""
Matroids Router - Catalog listing, matroid summaries and fan enumeration
"""

from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel
from typing import List, Optional
import logging

from ..catalog import Catalog
from ..dependencies import get_catalog, http_error
from services.exceptions import FanforgeError
from services.fans import enumerate_fans
from services.fields_repr import ReprMatroid
from services.formats import MatroidLike, as_matroid, dump_mtx, parse_mtx

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/matroids", tags=["matroids"])


class CatalogItem(BaseModel):
    """One catalog entry"""
    name: str
    elements: int
    rank: int
    recipe: str
    provenance: str
    binary: bool


class MatroidSummary(BaseModel):
    """Basic invariants of a matroid"""
    name: str
    elements: List[str]
    rank: int
    bases: int
    field: Optional[int] = None
    mtx: str


class FanItem(BaseModel):
    """A fan, listed from its lower-index end"""
    seq: List[str]
    triangle_first: bool


class FansResponse(BaseModel):
    """Fans of a matroid plus its recorded fan family, if any"""
    name: str
    fans: List[FanItem]
    family: List[List[str]] = []


class ParseRequest(BaseModel):
    """A matroid in .mtx text form"""
    mtx: str


def summarize(M: MatroidLike, name: str) -> MatroidSummary:
    matroid = as_matroid(M)
    return MatroidSummary(
        name=name,
        elements=list(matroid.groundset),
        rank=matroid.rank,
        bases=matroid.num_bases,
        field=M.p if isinstance(M, ReprMatroid) else None,
        mtx=dump_mtx(M, name=name),
    )


@router.get("/catalog", response_model=List[CatalogItem])
async def list_catalog(catalog: Catalog = Depends(get_catalog)):
    """List the named matroids"""
    try:
        items = []
        for entry in catalog.entries():
            M = catalog.matroid(entry.name)
            items.append(CatalogItem(name=entry.name, elements=M.size, rank=M.rank, recipe=entry.recipe,
                                     provenance=entry.provenance, binary=entry.binary))
        return items
    except Exception as e:
        raise http_error("Catalog Error", e)


@router.post("/parse", response_model=MatroidSummary)
async def parse_matroid(request: ParseRequest):
    """Parse .mtx text and summarize it"""
    try:
        M = parse_mtx(request.mtx)
        return summarize(M, M.name or "unnamed")
    except FanforgeError as e:
        raise http_error("Matroid Parse Error", e)


@router.get("/{name}", response_model=MatroidSummary)
async def show_matroid(name: str, catalog: Catalog = Depends(get_catalog)):
    """Show a catalog matroid"""
    if not catalog.has(name):
        raise HTTPException(status_code=404, detail=f"Unknown catalog matroid '{name}'")
    try:
        return summarize(catalog.get(name), name)
    except FanforgeError as e:
        raise http_error("Show Error", e)


@router.get("/{name}/fans", response_model=FansResponse)
async def list_fans(name: str, min_len: int = 3, catalog: Catalog = Depends(get_catalog)):
    """All fans of a catalog matroid with at least min_len elements"""
    if not catalog.has(name):
        raise HTTPException(status_code=404, detail=f"Unknown catalog matroid '{name}'")
    try:
        M = catalog.matroid(name)
        family = catalog.fans(name)
        return FansResponse(
            name=name,
            fans=[FanItem(seq=list(F.seq), triangle_first=F.triangle_first) for F in enumerate_fans(M, min_len)],
            family=[list(seq) for seq in family.sequences] if family else [],
        )
    except FanforgeError as e:
        raise http_error("Fan Enumeration Error", e)
