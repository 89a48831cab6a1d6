"""
Catalog Service for fanforge
Named matroids with a fixed recipe and a provenance note, so that every
name builds the same labeled matroid on every run.
"""

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from services.certifier import CertTask
from services.exceptions import InputError
from services.fans import FanFamily
from services.fields_repr import GF, ReprMatroid, graphic_matroid
from services.formats import as_matroid, read_matroid_file
from services.fragility import ClassPredicate, MinorSet
from services.matroid_core import Matroid
from services.wheel_glue import Blueprint, GlueResult, glue_wheels
from services.wheels import wheel, whirl

logger = logging.getLogger(__name__)

MatroidLike = Union[Matroid, ReprMatroid]

FANO_MATRIX = [
    [1, 0, 0, 1, 1, 0, 1],
    [0, 1, 0, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 1, 1],
]

# One triangle {a, b, c} on the line z = 0; no other three points collinear.
P6_MATRIX = [
    [1, 0, 1, 0, 1, 2],
    [0, 1, 1, 0, 2, 1],
    [0, 0, 0, 1, 1, 1],
]

# Five points of the conic xz = y^2 plus its point at infinity.
U36_MATRIX = [
    [1, 1, 1, 1, 1, 0],
    [0, 1, 2, 3, 4, 0],
    [0, 1, 4, 4, 1, 1],
]

N12_TRIANGLES = (("b", "a", "d"), ("c", "a", "e"), ("f", "a", "g"))
N12_DELETE = frozenset("adeg")

FAMILY_PATTERN = re.compile(r"^(wheel|whirl)(\d+)$")


@dataclass(frozen=True)
class CatalogEntry:
    """A named matroid recipe"""
    name: str
    recipe: str  # uniform | graphic | repr-matrix | dual-of | relax | glue-blueprint
    provenance: str
    build: Callable[[], MatroidLike] = field(compare=False, repr=False)
    fans: Callable[[], Tuple[Tuple[str, ...], ...]] = field(default=tuple, compare=False, repr=False)
    binary: bool = True


def _line(p: int, n: int, name: str) -> ReprMatroid:
    """n points of the projective line over GF(p), starting at (1, 0) and (0, 1)."""
    columns = [(1, 0), (0, 1)] + [(1, t) for t in range(1, p)]
    return ReprMatroid(p, "abcdefgh"[:n], [list(col) for col in zip(*columns[:n])], name=name)


def fano() -> ReprMatroid:
    return ReprMatroid(2, "abcdefg", FANO_MATRIX, name="F7")


def n12_blueprint() -> Blueprint:
    return Blueprint(fano(), N12_TRIANGLES, (3, 3, 3), N12_DELETE)


@lru_cache(maxsize=1)
def _n12_glue() -> GlueResult:
    return glue_wheels(n12_blueprint(), name="N12")


def n12() -> ReprMatroid:
    return _n12_glue().repr


def n12_fans() -> Tuple[Tuple[str, ...], ...]:
    """The three 4-element fans left by the three rank-3 wheels."""
    return tuple(_n12_glue().canonical_fans)


def _k4() -> ReprMatroid:
    G = nx.complete_graph(4, create_using=nx.MultiGraph)
    for (u, v, k), label in zip(G.edges(keys=True), "abcdef"):
        G.edges[u, v, k]["label"] = label
    return graphic_matroid(G, name="M(K4)")


class Catalog:
    """
    Registry of named matroids.

    Fixed entries are listed by `entries()`; the families `wheel<r>` and
    `whirl<r>` are resolved on demand for 2 <= r <= max_elements / 2.
    """

    def __init__(self, max_elements: int = 24):
        self.max_elements = max_elements
        self._entries: Dict[str, CatalogEntry] = {}
        self._built: Dict[str, MatroidLike] = {}
        self._register_defaults()

    def _register(self, entry: CatalogEntry):
        self._entries[entry.name] = entry

    def _register_defaults(self):
        self._register(CatalogEntry("U24", "repr-matrix", "all four points of the projective line over GF(3)",
                                    lambda: _line(3, 4, "U2,4"), binary=False))
        self._register(CatalogEntry("U25", "repr-matrix", "five points of the projective line over GF(5)",
                                    lambda: _line(5, 5, "U2,5"), binary=False))
        self._register(CatalogEntry("U35", "dual-of", "dual of U25",
                                    lambda: _line(5, 5, "U2,5").dual().relabel({}, name="U3,5"), binary=False))
        self._register(CatalogEntry("U26", "repr-matrix", "all six points of the projective line over GF(5)",
                                    lambda: _line(5, 6, "U2,6"), binary=False))
        self._register(CatalogEntry("U36", "repr-matrix", "a conic in the projective plane over GF(5)",
                                    lambda: ReprMatroid(5, "abcdef", U36_MATRIX, name="U3,6"), binary=False))
        self._register(CatalogEntry("U46", "dual-of", "dual of U26",
                                    lambda: _line(5, 6, "U2,6").dual().relabel({}, name="U4,6"), binary=False))
        self._register(CatalogEntry("P6", "repr-matrix",
                                    "rank 3 with a single triangle {a, b, c}, over GF(5); "
                                    "non-binary, excluded from GF(2) certification runs",
                                    lambda: ReprMatroid(5, "abcdef", P6_MATRIX, name="P6"), binary=False))
        self._register(CatalogEntry("F7", "repr-matrix", "the Fano plane: the seven nonzero vectors of GF(2)^3",
                                    fano, fans=lambda: (("a", "b", "d"),)))
        self._register(CatalogEntry("F7dual", "dual-of", "dual of F7",
                                    lambda: fano().dual().relabel({}, name="F7*")))
        self._register(CatalogEntry("MK4", "graphic", "cycle matroid of K4, isomorphic to wheel3", _k4))
        self._register(CatalogEntry("N12", "glue-blueprint",
                                    "rank-3 wheels glued onto the triangles abd, ace, afg of F7, "
                                    "then a, d, e, g deleted; fans are the three 4-fans left by the wheels",
                                    n12, fans=n12_fans))

    def _family_entry(self, name: str) -> Optional[CatalogEntry]:
        match = FAMILY_PATTERN.match(name)
        if not match:
            return None
        kind, r = match.group(1), int(match.group(2))
        if not 2 <= r <= self.max_elements // 2:
            raise InputError(f"{kind} rank must be between 2 and {self.max_elements // 2}, got {r}")
        if kind == "wheel":
            return CatalogEntry(name, "graphic", f"cycle matroid of the wheel graph with {r} spokes",
                                lambda: wheel(r))
        return CatalogEntry(name, "relax", f"wheel{r} with its rim circuit relaxed to a basis",
                            lambda: whirl(r), binary=False)

    def entry(self, name: str) -> CatalogEntry:
        """
        Raises:
            InputError: If the name is not in the catalog
        """
        if name in self._entries:
            return self._entries[name]
        family = self._family_entry(name)
        if family is None:
            raise InputError(f"Unknown catalog matroid '{name}'. Known: {', '.join(self.names())}, wheel<r>, whirl<r>")
        return family

    def get(self, name: str) -> MatroidLike:
        """Build (once) and return the named matroid."""
        if name not in self._built:
            entry = self.entry(name)
            logger.debug(f"Building catalog matroid {name} ({entry.recipe})")
            self._built[name] = entry.build()
        return self._built[name]

    def matroid(self, name: str) -> Matroid:
        M = self.get(name)
        return M.matroid if isinstance(M, ReprMatroid) else M

    def fans(self, name: str) -> Optional[FanFamily]:
        """Recorded fan family of an entry, if it has one."""
        entry = self.entry(name)
        sequences = entry.fans()
        if not sequences:
            return None
        return FanFamily.from_sequences(self.matroid(name), sequences)

    def names(self) -> List[str]:
        return list(self._entries)

    def entries(self) -> List[CatalogEntry]:
        return list(self._entries.values())

    def listing(self, names: Optional[Sequence[str]] = None) -> List[str]:
        """One line per entry: name, size, rank and provenance."""
        lines = []
        for name in names or self.names():
            entry = self.entry(name)
            M = self.matroid(name)
            lines.append(f"{name}: {M.size} elements, rank {M.rank}, {entry.recipe}; {entry.provenance}")
        return lines


    # -- resolution helpers shared by the CLI and the HTTP routers --------------

    def resolve(self, ref: str) -> MatroidLike:
        """A catalog name, or a path to a .mtx file."""
        if ref.endswith(".mtx") or Path(ref).is_file():
            return read_matroid_file(ref)
        return self.get(ref)

    def minor_set(self, names: Sequence[str]) -> MinorSet:
        return MinorSet(tuple(as_matroid(self.resolve(n)) for n in names if n))

    def task(self, N: MatroidLike, S: MinorSet, field: int, depth: int,
             fans: Optional[Sequence[Sequence[str]]] = None, N_ref: Optional[str] = None,
             fast_path: bool = True, sample_hypotheses: bool = False) -> CertTask:
        """
        Assemble a certification task. Without explicit fans, the catalog's
        recorded family for N_ref is used.

        Raises:
            InputError: If N has no representation over GF(field) or no fan family is known
        """
        if not isinstance(N, ReprMatroid):
            raise InputError(f"{N.name or 'N'} needs a matrix representation for certification")
        if N.p != field:
            raise InputError(f"{N.name or 'N'} is represented over GF({N.p}), not GF({field})")
        if fans is not None:
            family = FanFamily.from_sequences(N.matroid, fans)
        elif N_ref is not None and self.has(N_ref) and self.fans(N_ref) is not None:
            family = self.fans(N_ref)
        else:
            raise InputError(f"No fan family given for {N.name or 'N'}")
        return CertTask(N, family, ClassPredicate(GF(field), S), depth=depth,
                        fast_path=fast_path, sample_hypotheses=sample_hypotheses)

    def has(self, name: str) -> bool:
        try:
            self.entry(name)
            return True
        except InputError:
            return False
