"""
Represented Matroids for fanforge
Prime-field linear algebra, matrices with labeled columns, graphic
matroids, grafts, and single-element extension enumeration.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property, lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .exceptions import InputError, StructuralError
from .matroid_core import Matroid

logger = logging.getLogger(__name__)

SUPPORTED_PRIMES = (2, 3, 5, 7)
FRESH_PREFIX = "_x"


@dataclass(frozen=True)
class PrimeField:
    """Arithmetic in GF(p) through precomputed tables."""

    p: int

    def __post_init__(self):
        if self.p not in SUPPORTED_PRIMES:
            raise InputError(f"Unsupported field GF({self.p}); supported primes are {SUPPORTED_PRIMES}")

    @cached_property
    def add_table(self) -> np.ndarray:
        values = np.arange(self.p)
        return (values[:, None] + values[None, :]) % self.p

    @cached_property
    def mul_table(self) -> np.ndarray:
        values = np.arange(self.p)
        return (values[:, None] * values[None, :]) % self.p

    def inverse(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def check_axioms(self) -> bool:
        """Exhaustive check of the field axioms on the tables."""
        add, mul = self.add_table, self.mul_table
        p = self.p
        if not np.array_equal(add, add.T) or not np.array_equal(mul, mul.T):
            return False
        a, b, c = np.meshgrid(np.arange(p), np.arange(p), np.arange(p), indexing="ij")
        if not np.array_equal(add[add[a, b], c], add[a, add[b, c]]):
            return False
        if not np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]]):
            return False
        if not np.array_equal(mul[a, add[b, c]], add[mul[a, b], mul[a, c]]):
            return False
        if not np.array_equal(add[0], np.arange(p)) or not np.array_equal(mul[1], np.arange(p)):
            return False
        if not all((add[a0] == 0).any() for a0 in range(p)):
            return False
        return all((mul[a0] == 1).sum() == 1 for a0 in range(1, p))

    def __str__(self) -> str:
        return f"GF({self.p})"


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


# ---------------------------------------------------------------------------
# Linear algebra over GF(p)
# ---------------------------------------------------------------------------

def row_reduce(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form over GF(p).

    Args:
        A: Integer matrix
        p: Prime modulus

    Returns:
        (R, pivots): the reduced matrix and its pivot columns
    """
    R = np.array(A, dtype=np.int64) % p
    if R.ndim != 2:
        raise InputError("row_reduce expects a 2-dimensional matrix")
    rows, cols = R.shape
    pivots: List[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nonzero = np.flatnonzero(R[row:, col])
        if nonzero.size == 0:
            continue
        piv = row + int(nonzero[0])
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        R[row] = (R[row] * pow(int(R[row, col]), p - 2, p)) % p
        factors = R[:, col].copy()
        factors[row] = 0
        R = (R - np.outer(factors, R[row])) % p
        pivots.append(col)
        row += 1
    return R, pivots


def matrix_rank(A: np.ndarray, p: int) -> int:
    return len(row_reduce(A, p)[1])


def null_space(A: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of {x : A x = 0}."""
    A = np.array(A, dtype=np.int64)
    cols = A.shape[1]
    R, pivots = row_reduce(A, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-R[i, f]) % p
    return basis


def row_space(A: np.ndarray, p: int) -> np.ndarray:
    R, pivots = row_reduce(A, p)
    return R[: len(pivots)]


def subspace_intersection(U: np.ndarray, W: np.ndarray, p: int) -> np.ndarray:
    """
    Basis (as rows) of span(rows of U) ∩ span(rows of W).
    """
    U = np.atleast_2d(np.array(U, dtype=np.int64)) % p
    W = np.atleast_2d(np.array(W, dtype=np.int64)) % p
    if U.shape[0] == 0 or W.shape[0] == 0:
        return np.zeros((0, max(U.shape[1], W.shape[1])), dtype=np.int64)
    system = np.hstack([U.T, (-W.T) % p])
    kernel = null_space(system, p)
    if kernel.shape[0] == 0:
        return np.zeros((0, U.shape[1]), dtype=np.int64)
    vectors = (kernel[:, : U.shape[0]] @ U) % p
    return row_space(vectors, p)


def normalize(vector: np.ndarray, p: int) -> np.ndarray:
    """Scale so the first nonzero entry is 1."""
    vector = np.array(vector, dtype=np.int64) % p
    nonzero = np.flatnonzero(vector)
    if nonzero.size == 0:
        return vector
    return (vector * pow(int(vector[nonzero[0]]), p - 2, p)) % p


def projective_points(rows: int, p: int) -> Iterator[np.ndarray]:
    """Nonzero vectors of GF(p)^rows with first nonzero entry 1, lexicographic."""
    for digits in np.ndindex(*((p,) * rows)):
        nonzero = [d for d in digits if d]
        if nonzero and nonzero[0] == 1:
            yield np.array(digits, dtype=np.int64)


# ---------------------------------------------------------------------------
# Represented matroids
# ---------------------------------------------------------------------------

def fresh_label(existing: Iterable[str], prefix: str = FRESH_PREFIX) -> str:
    taken = set(existing)
    k = 1
    while f"{prefix}{k}" in taken:
        k += 1
    return f"{prefix}{k}"


def _bases_gf2(columns: Sequence[int], r: int) -> List[int]:
    n = len(columns)
    out: List[int] = []
    basis: Dict[int, int] = {}

    def dfs(start: int, mask: int, size: int):
        if size == r:
            out.append(mask)
            return
        for j in range(start, n - (r - size) + 1):
            v = columns[j]
            while v:
                top = v.bit_length() - 1
                if top not in basis:
                    break
                v ^= basis[top]
            if not v:
                continue
            top = v.bit_length() - 1
            basis[top] = v
            dfs(j + 1, mask | (1 << j), size + 1)
            del basis[top]

    dfs(0, 0, 0)
    return out


def _bases_generic(matrix: np.ndarray, r: int, p: int) -> List[int]:
    n = matrix.shape[1]
    cols = [matrix[:, j] % p for j in range(n)]
    out: List[int] = []
    basis: List[Tuple[int, np.ndarray]] = []

    def dfs(start: int, mask: int, size: int):
        if size == r:
            out.append(mask)
            return
        for j in range(start, n - (r - size) + 1):
            v = cols[j].copy()
            for piv, b in basis:
                if v[piv]:
                    v = (v - v[piv] * b) % p
            nonzero = np.flatnonzero(v)
            if nonzero.size == 0:
                continue
            piv = int(nonzero[0])
            basis.append((piv, (v * pow(int(v[piv]), p - 2, p)) % p))
            dfs(j + 1, mask | (1 << j), size + 1)
            basis.pop()

    dfs(0, 0, 0)
    return out


class ReprMatroid:
    """
    A matrix over GF(p) whose columns are labeled by matroid elements.

    The induced column matroid is available as `.matroid`. All operations
    return new instances.
    """

    def __init__(self, field, labels: Sequence[str], matrix, name: str = ""):
        self.field = field if isinstance(field, PrimeField) else GF(int(field))
        self.labels: Tuple[str, ...] = tuple(labels)
        p = self.field.p
        matrix = np.array(matrix, dtype=np.int64)
        if matrix.ndim == 1:
            matrix = matrix.reshape(0, len(self.labels)) if matrix.size == 0 else matrix.reshape(1, -1)
        if matrix.shape[1] != len(self.labels):
            raise InputError(f"Matrix has {matrix.shape[1]} columns for {len(self.labels)} labels")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("Duplicate column labels")
        self.matrix = matrix % p
        self.matrix.setflags(write=False)
        self.name = name

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def matroid(self) -> Matroid:
        return to_matroid(self)

    @property
    def rank(self) -> int:
        return self.matroid.rank

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"Unknown element label '{label}' in {self.name or 'representation'}")

    def column(self, label: str) -> np.ndarray:
        return self.matrix[:, self.index(label)].copy()

    def columns(self, labels: Iterable[str]) -> np.ndarray:
        return self.matrix[:, [self.index(e) for e in labels]]

    def delete(self, X: Iterable[str]) -> "ReprMatroid":
        X = set(X)
        for e in X:
            self.index(e)
        keep = [j for j, e in enumerate(self.labels) if e not in X]
        return ReprMatroid(self.field, [self.labels[j] for j in keep], self.matrix[:, keep], name="")

    def contract(self, X: Iterable[str]) -> "ReprMatroid":
        """Project away the span of the X columns."""
        X = list(X)
        sub = self.columns(X)
        projection = null_space(sub.T, self.p) if sub.size else np.eye(self.rows, dtype=np.int64)
        rest = self.delete(X)
        return ReprMatroid(self.field, rest.labels, (projection @ rest.matrix) % self.p, name="")

    def reduced(self) -> "ReprMatroid":
        """Same matroid with row count equal to the rank."""
        return ReprMatroid(self.field, self.labels, row_space(self.matrix, self.p), name=self.name)

    def dual(self) -> "ReprMatroid":
        """Standard-form representation of the dual."""
        p = self.p
        R, pivots = row_reduce(self.matrix, p)
        n = len(self.labels)
        nonpivots = [j for j in range(n) if j not in pivots]
        out = np.zeros((len(nonpivots), n), dtype=np.int64)
        for row, q in enumerate(nonpivots):
            out[row, q] = 1
            for i, pc in enumerate(pivots):
                out[row, pc] = (-R[i, q]) % p
        if self.name.endswith("*"):
            name = self.name[:-1]
        else:
            name = f"{self.name}*" if self.name else ""
        return ReprMatroid(self.field, self.labels, out, name=name)

    def with_column(self, label: str, vector) -> "ReprMatroid":
        if label in self.labels:
            raise InputError(f"Label '{label}' already present")
        vector = np.array(vector, dtype=np.int64).reshape(-1, 1)
        if vector.shape[0] != self.rows:
            raise InputError(f"Column has {vector.shape[0]} entries, expected {self.rows}")
        return ReprMatroid(self.field, self.labels + (label,), np.hstack([self.matrix, vector]), name="")

    def relabel(self, mapping: Dict[str, str], name: Optional[str] = None) -> "ReprMatroid":
        return ReprMatroid(
            self.field,
            [mapping.get(e, e) for e in self.labels],
            self.matrix,
            name=self.name if name is None else name,
        )

    def restrict(self, X: Iterable[str]) -> "ReprMatroid":
        X = list(X)
        return ReprMatroid(self.field, X, self.columns(X), name="")

    def __repr__(self) -> str:
        return f"ReprMatroid({self.name!r}, {self.field}, {self.rows}x{len(self.labels)})"


def to_matroid(R: ReprMatroid) -> Matroid:
    """Column matroid: bases are the maximal linearly independent column sets."""
    r = matrix_rank(R.matrix, R.p)
    if R.p == 2:
        columns = [sum(int(v) << i for i, v in enumerate(R.matrix[:, j])) for j in range(len(R.labels))]
        masks = _bases_gf2(columns, r)
    else:
        masks = _bases_generic(R.matrix, r, R.p)
    return Matroid(R.labels, masks, name=R.name, check=False)


def extensions(R: ReprMatroid, label: Optional[str] = None) -> List[ReprMatroid]:
    """
    One single-element extension per projective point of the column space.

    The new column gets a fresh label unless one is given.
    """
    base = R.reduced()
    label = label or fresh_label(R.labels)
    return [base.with_column(label, v) for v in projective_points(base.rows, R.p)]


def coextensions(R: ReprMatroid, label: Optional[str] = None) -> List[ReprMatroid]:
    """Extensions of the dual representation, dualized back."""
    return [e.dual() for e in extensions(R.dual(), label=label)]


# ---------------------------------------------------------------------------
# Graphs and grafts
# ---------------------------------------------------------------------------

def _edge_list(G: nx.Graph) -> List[Tuple[object, object, str]]:
    edges = []
    for k, (u, v, label) in enumerate(G.edges(data="label")):
        edges.append((u, v, str(label) if label is not None else f"e{k + 1}"))
    return edges


def _incidence(G: nx.Graph, edges, p: int) -> np.ndarray:
    vertices = list(G.nodes)
    row = {v: i for i, v in enumerate(vertices)}
    A = np.zeros((len(vertices), len(edges)), dtype=np.int64)
    for j, (u, v, _) in enumerate(edges):
        if u == v:
            continue
        A[row[u], j] = 1
        A[row[v], j] = (A[row[v], j] - 1) % p
    return A


def graphic_matroid(G: nx.Graph, p: int = 2, name: str = "") -> ReprMatroid:
    """
    Cycle matroid of a connected graph as an oriented incidence matrix mod p.

    Edges are labeled by their `label` attribute. The first vertex row is
    dropped.

    Raises:
        StructuralError: If G is not connected
    """
    if G.number_of_nodes() == 0 or not nx.is_connected(G):
        raise StructuralError(f"Graph '{name}' is not connected" if name else "Graph is not connected")
    edges = _edge_list(G)
    A = _incidence(G, edges, p)
    return ReprMatroid(GF(p), [e for _, _, e in edges], A[1:], name=name)


@dataclass(frozen=True)
class Graft:
    """A graph with a distinguished vertex set gamma."""

    graph: nx.MultiGraph
    gamma: frozenset = dataclass_field(default_factory=frozenset)
    label: str = "g"


def graft_matroid(g: Graft, name: str = "") -> ReprMatroid:
    """
    Binary matroid of a graft: the cycle matroid plus one column for gamma.

    An odd gamma gives a coloop, an empty gamma a loop.

    Raises:
        InputError: If gamma is not a vertex subset or the label collides
        StructuralError: If the graph is not connected
    """
    G = g.graph
    unknown = set(g.gamma) - set(G.nodes)
    if unknown:
        raise InputError(f"Graft vertices {sorted(map(str, unknown))} are not in the graph")
    if G.number_of_nodes() == 0 or not nx.is_connected(G):
        raise StructuralError("Graft graph is not connected")
    edges = _edge_list(G)
    labels = [e for _, _, e in edges]
    if g.label in labels:
        raise InputError(f"Graft label '{g.label}' collides with an edge label")
    A = _incidence(G, edges, 2)
    gamma = np.array([[1 if v in g.gamma else 0] for v in G.nodes], dtype=np.int64)
    full = ReprMatroid(GF(2), labels + [g.label], np.hstack([A, gamma]), name=name)
    return full.reduced()
