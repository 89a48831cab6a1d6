"""
Matroid Core for fanforge
Abstract matroids stored as a ground set plus a bitmask basis family.

Every structural query (rank, closure, connectivity, circuits) is answered
from a rank table holding r(X) for all 2^n subsets X, built once per matroid
with numpy and cached on the instance.
"""

import itertools
import logging
import math
import string
import threading
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import InputError, StructuralError

logger = logging.getLogger(__name__)

MAX_ELEMENTS = 24

# Above this size the basis family is validated by direct exchange
# instead of local submodularity of the rank table.
_SUBMODULAR_CHECK_LIMIT = 20


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    """Popcount of every integer in [0, 2^n)."""
    pop = np.zeros(1 << n, dtype=np.int8)
    for i in range(n):
        pop.reshape(-1, 2, 1 << i)[:, 1, :] += 1
    pop.setflags(write=False)
    return pop


_POP16 = _popcounts(16)


def popcount(values: np.ndarray) -> np.ndarray:
    """Vectorized popcount for masks below 2^32."""
    values = np.asarray(values, dtype=np.int64)
    return (_POP16[values & 0xFFFF] + _POP16[(values >> 16) & 0xFFFF]).astype(np.int64)


def _bits(mask: int) -> List[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def _compress(masks: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Re-index masks onto the kept bit positions, in the order given."""
    out = np.zeros_like(masks)
    for new, old in enumerate(keep):
        out |= ((masks >> old) & 1) << new
    return out


def _permute(masks: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Send bit i to bit perm[i]."""
    out = np.zeros_like(masks)
    for old, new in enumerate(perm):
        out |= ((masks >> old) & 1) << new
    return out


def _check_label(label) -> str:
    if not isinstance(label, str) or not label or label.startswith("#") or any(c.isspace() for c in label):
        raise InputError(f"Invalid element label: {label!r}")
    return label


class Matroid:
    """
    A matroid on an ordered ground set of string labels.

    Bases are stored as a sorted numpy array of bitmasks over the ground-set
    index. Instances are immutable; derived tables are computed lazily.
    """

    def __init__(self, groundset: Sequence[str], bases: Iterable[int], name: str = "", check: bool = True):
        """
        Build a matroid from basis masks.

        Args:
            groundset: Ordered element labels
            bases: Basis bitmasks over the ground-set index
            name: Optional display name
            check: Validate the basis-exchange axiom

        Raises:
            InputError: If labels repeat, there are too many elements,
                or the family is not a basis family
        """
        labels = tuple(_check_label(e) for e in groundset)
        if len(set(labels)) != len(labels):
            raise InputError(f"Duplicate element labels in {name or 'matroid'}")
        if len(labels) > MAX_ELEMENTS:
            raise InputError(f"{name or 'matroid'} has {len(labels)} elements; at most {MAX_ELEMENTS} are supported")

        masks = np.unique(np.fromiter((int(b) for b in bases), dtype=np.int64))
        if masks.size == 0:
            raise InputError(f"{name or 'matroid'} has no bases")

        self.groundset: Tuple[str, ...] = labels
        self.name = name
        self._bases = masks
        self._bases.setflags(write=False)
        self._index: Dict[str, int] = {e: i for i, e in enumerate(labels)}
        self._memo: Dict[Hashable, object] = {}
        self._memo_lock = threading.Lock()

        if check:
            self._validate()
        self.rank = int(popcount(masks[:1])[0])

    # -- construction checks -------------------------------------------------

    def _validate(self):
        n = len(self.groundset)
        full = (1 << n) - 1
        if int(self._bases.min()) < 0 or int(self._bases.max()) > full:
            raise InputError(f"Basis mask out of range for {n} elements")
        sizes = popcount(self._bases)
        if not np.all(sizes == sizes[0]):
            raise InputError("Bases have different sizes")

        if n <= _SUBMODULAR_CHECK_LIMIT:
            # A down-closed family is a matroid iff its max-size rank is submodular;
            # unit increase and monotonicity make the local check sufficient.
            table = self.rank_table
            universe = np.arange(1 << n, dtype=np.int64)
            for a, b in itertools.combinations(range(n), 2):
                pair = (1 << a) | (1 << b)
                base = universe[(universe & pair) == 0]
                lhs = table[base | (1 << a)].astype(np.int16) + table[base | (1 << b)]
                rhs = table[base | pair].astype(np.int16) + table[base]
                if np.any(lhs < rhs):
                    raise InputError("Basis family violates the exchange axiom")
            return

        basis_set = set(int(b) for b in self._bases)
        for b1 in self._bases:
            b1 = int(b1)
            outside = full & ~b1
            for x in _bits(b1):
                ok = 0
                for y in _bits(outside):
                    if (b1 ^ (1 << x)) | (1 << y) in basis_set:
                        ok |= 1 << y
                others = self._bases[(self._bases & (1 << x)) == 0]
                if np.any((others & ok) == 0):
                    raise InputError("Basis family violates the exchange axiom")

    # -- cached tables -------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.groundset)

    @property
    def full(self) -> int:
        return (1 << len(self.groundset)) - 1

    @cached_property
    def rank_table(self) -> np.ndarray:
        """r(X) for every subset mask X."""
        n = len(self.groundset)
        indep = np.zeros(1 << n, dtype=bool)
        indep[self._bases] = True
        for i in range(n):
            view = indep.reshape(-1, 2, 1 << i)
            view[:, 0, :] |= view[:, 1, :]
        table = np.where(indep, _popcounts(n), 0).astype(np.int8)
        for i in range(n):
            view = table.reshape(-1, 2, 1 << i)
            np.maximum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
        table.setflags(write=False)
        return table

    @cached_property
    def independent_table(self) -> np.ndarray:
        return self.rank_table == _popcounts(len(self.groundset))

    @cached_property
    def circuit_table(self) -> np.ndarray:
        """True exactly at the circuit masks."""
        n = len(self.groundset)
        indep = self.independent_table
        circ = ~indep
        for i in range(n):
            circ.reshape(-1, 2, 1 << i)[:, 1, :] &= indep.reshape(-1, 2, 1 << i)[:, 0, :]
        circ.setflags(write=False)
        return circ

    @cached_property
    def lambda_table(self) -> np.ndarray:
        """Connectivity function r(X) + r(E-X) - r(E) for every mask."""
        table = self.rank_table.astype(np.int16)
        lam = (table + table[::-1] - self.rank).astype(np.int8)
        lam.setflags(write=False)
        return lam

    @cached_property
    def dual(self) -> "Matroid":
        if self.name.endswith("*"):
            name = self.name[:-1]
        else:
            name = f"{self.name}*" if self.name else ""
        other = Matroid(self.groundset, self.full ^ self._bases, name=name, check=False)
        other.__dict__["dual"] = self
        return other

    # -- labels and masks ----------------------------------------------------

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"Unknown element label '{label}' in {self.name or 'matroid'}")

    def mask(self, labels) -> int:
        """Bitmask of a label collection; a bare string is one label."""
        if isinstance(labels, str):
            labels = (labels,)
        out = 0
        for e in labels:
            out |= 1 << self.index(e)
        return out

    def labels(self, mask: int) -> Tuple[str, ...]:
        """Labels of a mask in ground-set order."""
        mask = int(mask)
        return tuple(e for i, e in enumerate(self.groundset) if (mask >> i) & 1)

    @property
    def num_bases(self) -> int:
        return int(self._bases.size)

    @property
    def basis_masks(self) -> np.ndarray:
        return self._bases

    @cached_property
    def bases(self) -> frozenset:
        return frozenset(frozenset(self.labels(b)) for b in self._bases)

    def reordered(self, order: Sequence[str]) -> "Matroid":
        """Same matroid with the ground set listed in a different order."""
        if sorted(order) != sorted(self.groundset):
            raise InputError("Reordering must list exactly the ground set")
        position = {e: i for i, e in enumerate(order)}
        perm = [position[e] for e in self.groundset]
        return Matroid(tuple(order), _permute(self._bases, perm), name=self.name, check=False)

    def memo(self, key: Hashable, factory: Callable[[], object]):
        """Per-instance cache for derived values."""
        with self._memo_lock:
            if key in self._memo:
                return self._memo[key]
        value = factory()
        with self._memo_lock:
            return self._memo.setdefault(key, value)

    # -- equality ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matroid):
            return NotImplemented
        if set(self.groundset) != set(other.groundset):
            return False
        if self.rank != other.rank or self.num_bases != other.num_bases:
            return False
        if other.groundset != self.groundset:
            other = other.reordered(self.groundset)
        return bool(np.array_equal(self._bases, other._bases))

    def __hash__(self) -> int:
        return hash((frozenset(self.groundset), self.rank, self.num_bases))

    def __repr__(self) -> str:
        return f"Matroid({self.name!r}, n={self.size}, r={self.rank}, bases={self.num_bases})"

    def __getstate__(self):
        return {"groundset": self.groundset, "bases": self._bases.tolist(), "name": self.name}

    def __setstate__(self, state):
        self.__init__(state["groundset"], state["bases"], name=state["name"], check=False)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def default_labels(n: int) -> Tuple[str, ...]:
    if n <= 26:
        return tuple(string.ascii_lowercase[:n])
    return tuple(f"e{i}" for i in range(1, n + 1))


def from_bases(groundset: Sequence[str], bases: Iterable[Iterable[str]], name: str = "") -> Matroid:
    """Build and validate a matroid from bases given as label collections."""
    groundset = tuple(groundset)
    index = {e: i for i, e in enumerate(groundset)}
    masks = []
    for basis in bases:
        mask = 0
        for e in basis:
            if e not in index:
                raise InputError(f"Unknown element label '{e}' in basis")
            mask |= 1 << index[e]
        masks.append(mask)
    return Matroid(groundset, masks, name=name)


def uniform_matroid(r: int, n: int, labels: Optional[Sequence[str]] = None) -> Matroid:
    """U_{r,n}: every r-subset is a basis."""
    if not 0 <= r <= n:
        raise InputError(f"Invalid uniform matroid U{r},{n}")
    labels = tuple(labels) if labels is not None else default_labels(n)
    masks = [sum(1 << i for i in combo) for combo in itertools.combinations(range(n), r)]
    return Matroid(labels, masks, name=f"U{r},{n}", check=False)


def relabel(M: Matroid, mapping: Dict[str, str], name: Optional[str] = None) -> Matroid:
    """Rename elements; labels missing from the mapping stay as they are."""
    for e in mapping:
        M.index(e)
    labels = tuple(mapping.get(e, e) for e in M.groundset)
    if len(set(labels)) != len(labels):
        raise InputError("Relabeling is not injective")
    return Matroid(labels, M.basis_masks, name=M.name if name is None else name, check=False)


# ---------------------------------------------------------------------------
# Rank and minors
# ---------------------------------------------------------------------------

def rank(M: Matroid, X: Iterable[str] = ()) -> int:
    return int(M.rank_table[M.mask(X)])


def corank(M: Matroid, X: Iterable[str] = ()) -> int:
    mask = M.mask(X)
    return int(popcount(np.array([mask]))[0]) + int(M.rank_table[M.full ^ mask]) - M.rank


def dual(M: Matroid) -> Matroid:
    return M.dual


def _minor(M: Matroid, cmask: int, dmask: int) -> Matroid:
    if cmask & dmask:
        raise InputError("Contract and delete sets overlap")
    bases = M.basis_masks
    if cmask:
        meet = popcount(bases & cmask)
        bases = bases[meet == meet.max()] & ~cmask
    if dmask:
        bases = bases & ~dmask
        sizes = popcount(bases)
        bases = bases[sizes == sizes.max()]
    keep = [i for i in range(M.size) if not ((cmask | dmask) >> i) & 1]
    labels = tuple(M.groundset[i] for i in keep)
    return Matroid(labels, _compress(np.unique(bases), keep), name="", check=False)


def minor(M: Matroid, contract: Iterable[str] = (), delete: Iterable[str] = ()) -> Matroid:
    """M / contract \\ delete."""
    return _minor(M, M.mask(contract), M.mask(delete))


def delete(M: Matroid, X: Iterable[str]) -> Matroid:
    return _minor(M, 0, M.mask(X))


def contract(M: Matroid, X: Iterable[str]) -> Matroid:
    return _minor(M, M.mask(X), 0)


def restrict(M: Matroid, X: Iterable[str]) -> Matroid:
    return _minor(M, 0, M.full ^ M.mask(X))


# ---------------------------------------------------------------------------
# Circuits, closure, connectivity
# ---------------------------------------------------------------------------

def _sorted_masks(masks: np.ndarray) -> List[int]:
    """Order masks lexicographically by their increasing index tuples."""
    return sorted((int(m) for m in masks), key=_bits)


def circuit_masks(M: Matroid, size: Optional[int] = None) -> List[int]:
    def build():
        found = np.flatnonzero(M.circuit_table)
        return _sorted_masks(found)

    found = M.memo("circuits", build)
    if size is None:
        return list(found)
    return [c for c in found if bin(c).count("1") == size]


def circuits(M: Matroid) -> List[frozenset]:
    return [frozenset(M.labels(c)) for c in circuit_masks(M)]


def triangles(M: Matroid) -> List[frozenset]:
    return [frozenset(M.labels(c)) for c in circuit_masks(M, 3)]


def triads(M: Matroid) -> List[frozenset]:
    return triangles(M.dual)


def _closure_mask(M: Matroid, mask: int) -> int:
    table = M.rank_table
    r = table[mask]
    out = mask
    for i in range(M.size):
        if table[mask | (1 << i)] == r:
            out |= 1 << i
    return out


def closure(M: Matroid, X: Iterable[str]) -> frozenset:
    return frozenset(M.labels(_closure_mask(M, M.mask(X))))


def coclosure(M: Matroid, X: Iterable[str]) -> frozenset:
    return closure(M.dual, X)


def lambda_(M: Matroid, X: Iterable[str]) -> int:
    """Connectivity function r(X) + r(E-X) - r(E)."""
    return int(M.lambda_table[M.mask(X)])


def separations(M: Matroid, order: int) -> List[int]:
    """Masks X with lambda(X) < order and |X|, |E-X| >= order, each side once."""
    n = M.size
    sizes = _popcounts(n)
    hits = np.flatnonzero((M.lambda_table < order) & (sizes >= order) & (sizes <= n - order))
    return _sorted_masks(hits[(hits & 1) == 0] if n else hits)


def is_connected(M: Matroid) -> bool:
    return not separations(M, 1)


def components(M: Matroid) -> List[frozenset]:
    """Connected components in ground-set order of their first element."""
    seps = np.flatnonzero(M.lambda_table == 0).astype(np.int64)
    out, seen = [], 0
    for i in range(M.size):
        if (seen >> i) & 1:
            continue
        comp = int(np.bitwise_and.reduce(seps[((seps >> i) & 1) == 1]))
        seen |= comp
        out.append(frozenset(M.labels(comp)))
    return out


def is_3connected(M: Matroid) -> bool:
    """No 1- or 2-separation."""

    def compute():
        n = M.size
        if n == 0:
            return True
        sizes = _popcounts(n)
        lam = M.lambda_table
        bad = ((lam == 0) & (sizes >= 1) & (sizes <= n - 1)) | ((lam <= 1) & (sizes >= 2) & (sizes <= n - 2))
        return not bool(bad.any())

    return M.memo("3conn", compute)


def is_3conn_up_to_sp(M: Matroid) -> bool:
    """Connected, and every 2-separation has a side of rank 1 or corank 1."""

    def compute():
        if not is_connected(M):
            return False
        n = M.size
        sizes = _popcounts(n)
        two_seps = np.flatnonzero((M.lambda_table == 1) & (sizes >= 2) & (sizes <= n - 2))
        if two_seps.size == 0:
            return True
        r = M.rank_table
        rs = M.dual.rank_table
        comp = M.full ^ two_seps
        rank_one = np.minimum(r[two_seps], r[comp]) == 1
        corank_one = np.minimum(rs[two_seps], rs[comp]) == 1
        return bool(np.all(rank_one | corank_one))

    return M.memo("3conn_sp", compute)


def _parallel_partition(M: Matroid) -> List[frozenset]:
    table = M.rank_table
    classes, seen = [], 0
    for i in range(M.size):
        if (seen >> i) & 1:
            continue
        cls = 1 << i
        if table[1 << i] == 1:
            for j in range(i + 1, M.size):
                if table[1 << j] == 1 and table[(1 << i) | (1 << j)] == 1:
                    cls |= 1 << j
        seen |= cls
        classes.append(frozenset(M.labels(cls)))
    return classes


def parallel_classes(M: Matroid) -> List[frozenset]:
    """Parallel classes of a connected matroid, ordered by first element."""
    if not is_connected(M):
        raise StructuralError(f"{M.name or 'matroid'} is not connected")
    return _parallel_partition(M)


def series_classes(M: Matroid) -> List[frozenset]:
    if not is_connected(M):
        raise StructuralError(f"{M.name or 'matroid'} is not connected")
    return _parallel_partition(M.dual)


def simplify(M: Matroid) -> Matroid:
    """Delete loops and all but the first element of every parallel class."""
    table = M.rank_table
    drop = 0
    for cls in _parallel_partition(M):
        members = sorted(cls, key=M.index)
        if table[M.mask(members[:1])] == 0:
            drop |= M.mask(members)
        else:
            drop |= M.mask(members[1:])
    return _minor(M, 0, drop)


def cosimplify(M: Matroid) -> Matroid:
    return simplify(M.dual).dual


# ---------------------------------------------------------------------------
# Flats
# ---------------------------------------------------------------------------

def flat_masks(M: Matroid) -> np.ndarray:
    def compute():
        n = M.size
        table = M.rank_table
        flat = np.ones(1 << n, dtype=bool)
        for i in range(n):
            t = table.reshape(-1, 2, 1 << i)
            flat.reshape(-1, 2, 1 << i)[:, 0, :] &= t[:, 1, :] > t[:, 0, :]
        return np.flatnonzero(flat).astype(np.int64)

    return M.memo("flats", compute)


def flats(M: Matroid) -> List[frozenset]:
    return [frozenset(M.labels(f)) for f in _sorted_masks(flat_masks(M))]


def is_flat(M: Matroid, X: Iterable[str]) -> bool:
    mask = M.mask(X)
    return _closure_mask(M, mask) == mask


def is_modular_flat(M: Matroid, X: Iterable[str]) -> bool:
    """A flat F is modular when r(F) + r(G) = r(F | G) + r(F & G) for every flat G."""
    mask = M.mask(X)
    if _closure_mask(M, mask) != mask:
        return False
    table = M.rank_table.astype(np.int16)
    fl = flat_masks(M)
    return bool(np.all(table[mask] + table[fl] == table[fl | mask] + table[fl & mask]))


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------

_SMALL = 4


def _small_circuits(M: Matroid) -> List[int]:
    return M.memo("small_circuits", lambda: [c for c in circuit_masks(M) if bin(c).count("1") <= _SMALL])


def element_invariants(M: Matroid) -> Tuple[tuple, ...]:
    """Per-element counts: bases, then small circuits and small cocircuits by size."""

    def compute():
        n = M.size
        counts = [[0] * (1 + 2 * _SMALL) for _ in range(n)]
        bases = M.basis_masks
        for i in range(n):
            counts[i][0] = int(np.count_nonzero((bases >> i) & 1))
        for offset, mat in ((1, M), (1 + _SMALL, M.dual)):
            for c in _small_circuits(mat):
                size = bin(c).count("1")
                for i in _bits(c):
                    counts[i][offset + size - 1] += 1
        return tuple(tuple(row) for row in counts)

    return M.memo("element_invariants", compute)


def iso_key(M: Matroid) -> tuple:
    """Isomorphism invariant; equal keys are necessary for isomorphism."""

    def compute():
        hist = np.bincount(popcount(np.array(circuit_masks(M), dtype=np.int64)), minlength=M.size + 2)
        return (M.size, M.rank, M.num_bases, tuple(sorted(element_invariants(M))), tuple(int(h) for h in hist))

    return M.memo("iso_key", compute)


def isomorphisms(M1: Matroid, M2: Matroid, fixed: Optional[Dict[str, str]] = None) -> Iterator[Dict[str, str]]:
    """
    Enumerate isomorphisms M1 -> M2 as label dictionaries.

    Candidates are pooled by element invariants and partial maps are pruned
    against small circuits and cocircuits in both directions. When labels
    coincide the identity is tried first.

    Args:
        M1: Source matroid
        M2: Target matroid
        fixed: Assignments every yielded isomorphism must extend
    """
    if (M1.size, M1.rank, M1.num_bases) != (M2.size, M2.rank, M2.num_bases):
        return
    inv1, inv2 = element_invariants(M1), element_invariants(M2)
    if sorted(inv1) != sorted(inv2):
        return
    n = M1.size
    fixed = {M1.index(a): M2.index(b) for a, b in (fixed or {}).items()}

    pools: List[List[int]] = []
    for i in range(n):
        if i in fixed:
            pool = [fixed[i]] if inv2[fixed[i]] == inv1[i] else []
        else:
            pool = [j for j in range(n) if inv2[j] == inv1[i]]
            same = M2._index.get(M1.groundset[i])
            if same in pool:
                pool.remove(same)
                pool.insert(0, same)
        if not pool:
            return
        pools.append(pool)

    # Side 0 is circuits, side 1 cocircuits.
    tables1 = (M1.circuit_table, M1.dual.circuit_table)
    tables2 = (M2.circuit_table, M2.dual.circuit_table)
    small1 = [(c, 0) for c in _small_circuits(M1)] + [(c, 1) for c in _small_circuits(M1.dual)]
    small2 = [(c, 0) for c in _small_circuits(M2)] + [(c, 1) for c in _small_circuits(M2.dual)]

    # Search order: fewest candidates first, then elements sharing small circuits with placed ones.
    order: List[int] = []
    placed = 0
    remaining = set(range(n))
    while remaining:
        def score(i):
            touching = sum(1 for c, _ in small1 if (c >> i) & 1 and c & placed)
            return (len(pools[i]), -touching, i)

        nxt = min(remaining, key=score)
        order.append(nxt)
        placed |= 1 << nxt
        remaining.discard(nxt)

    position = {e: k for k, e in enumerate(order)}
    checks1: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
    for c, side in small1:
        last = max(_bits(c), key=lambda i: position[i])
        checks1[position[last]].append((c, side))
    checks2: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
    for c, side in small2:
        for j in _bits(c):
            checks2[j].append((c, side))

    forward = [-1] * n
    backward = [-1] * n
    target = M2.basis_masks

    def consistent(k: int, j: int, image: int) -> bool:
        for c, side in checks1[k]:
            img = 0
            for i in _bits(c):
                img |= 1 << forward[i]
            if not tables2[side][img]:
                return False
        for c, side in checks2[j]:
            if c & ~image:
                continue
            pre = 0
            for jj in _bits(c):
                pre |= 1 << backward[jj]
            if not tables1[side][pre]:
                return False
        return True

    def search(k: int, image: int) -> Iterator[Dict[str, str]]:
        if k == n:
            mapped = np.sort(_permute(M1.basis_masks, forward))
            if np.array_equal(mapped, target):
                yield {M1.groundset[i]: M2.groundset[forward[i]] for i in range(n)}
            return
        i = order[k]
        for j in pools[i]:
            if (image >> j) & 1:
                continue
            forward[i], backward[j] = j, i
            if consistent(k, j, image | (1 << j)):
                yield from search(k + 1, image | (1 << j))
            forward[i], backward[j] = -1, -1

    yield from search(0, 0)


def is_isomorphic(M1: Matroid, M2: Matroid) -> Optional[Dict[str, str]]:
    """Some isomorphism M1 -> M2, or None."""
    if iso_key(M1) != iso_key(M2):
        return None
    return next(isomorphisms(M1, M2), None)


class IsoIndex:
    """
    Deduplicates matroids up to isomorphism.

    Buckets are keyed by iso_key; a new matroid is compared by backtracking
    only against the bucket it falls into. Safe to share between threads.
    """

    def __init__(self):
        self._buckets: Dict[tuple, List[Tuple[Matroid, object]]] = {}
        self._lock = threading.Lock()
        self._count = 0

    def lookup(self, M: Matroid) -> Optional[Tuple[Matroid, object]]:
        key = iso_key(M)
        with self._lock:
            bucket = list(self._buckets.get(key, ()))
        for entry in bucket:
            if next(isomorphisms(M, entry[0]), None) is not None:
                return entry
        return None

    def add(self, M: Matroid, payload: object = None) -> Tuple[Tuple[Matroid, object], bool]:
        """Insert M unless an isomorphic copy is present; returns (entry, inserted)."""
        found = self.lookup(M)
        if found is not None:
            return found, False
        with self._lock:
            entry = (M, payload)
            self._buckets.setdefault(iso_key(M), []).append(entry)
            self._count += 1
        return entry, True

    def items(self) -> List[Tuple[Matroid, object]]:
        with self._lock:
            return [entry for bucket in self._buckets.values() for entry in bucket]

    def __len__(self) -> int:
        return self._count


# ---------------------------------------------------------------------------
# Minors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinorWitness:
    """M / contract \\ delete is isomorphic to N through embedding."""

    contract: frozenset
    delete: frozenset
    embedding: Tuple[Tuple[str, str], ...]

    @property
    def mapping(self) -> Dict[str, str]:
        """N label -> M label."""
        return dict(self.embedding)

    @property
    def is_literal(self) -> bool:
        return all(a == b for a, b in self.embedding)


# Delete-set counts from which restrictions are screened in bulk.
_RESTRICTION_FILTER_AT = 32


def _subset_counts(M: Matroid, r: int) -> np.ndarray:
    """Number of independent r-subsets inside every mask."""
    n = M.size
    counts = (M.independent_table & (_popcounts(n) == r)).astype(np.int32)
    for i in range(n):
        view = counts.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return counts


def _fitting_deletions(contracted: Matroid, N: Matroid, rest: Sequence[int]) -> List[Tuple[int, ...]]:
    """
    Delete sets, in the indices listed by `rest`, whose restriction of
    `contracted` matches N in size, rank and basis count. Lexicographic order.
    """
    fit = (
        (_popcounts(contracted.size) == N.size)
        & (contracted.rank_table == N.rank)
        & (_subset_counts(contracted, N.rank) == N.num_bases)
    )
    dsets = []
    for keep in np.flatnonzero(fit).tolist():
        dsets.append(tuple(i for k, i in enumerate(rest) if not (keep >> k) & 1))
    return sorted(dsets)


def minor_witnesses(M: Matroid, N: Matroid) -> Iterator[MinorWitness]:
    """
    Every way of finding N as a minor of M.

    Contract sets are independent and delete sets coindependent, which
    covers every minor exactly once per kept set and partition. Order is
    lexicographic in the ground-set index of the contract set, then the
    delete set, then isomorphism search order.
    """
    k = M.size - N.size
    kc = M.rank - N.rank
    kd = k - kc
    if k < 0 or kc < 0 or kd < 0:
        return
    table = M.rank_table
    key = iso_key(N)
    for cset in itertools.combinations(range(M.size), kc):
        cmask = sum(1 << i for i in cset)
        if table[cmask] != kc:
            continue
        rest = [i for i in range(M.size) if not (cmask >> i) & 1]
        if math.comb(len(rest), kd) >= _RESTRICTION_FILTER_AT:
            dsets = _fitting_deletions(_minor(M, cmask, 0), N, rest)
        else:
            dsets = itertools.combinations(rest, kd)
        for dset in dsets:
            dmask = sum(1 << i for i in dset)
            if table[M.full ^ dmask] != M.rank:
                continue
            P = _minor(M, cmask, dmask)
            if P.num_bases != N.num_bases or iso_key(P) != key:
                continue
            for iso in isomorphisms(N, P):
                yield MinorWitness(
                    contract=frozenset(M.labels(cmask)),
                    delete=frozenset(M.labels(dmask)),
                    embedding=tuple((e, iso[e]) for e in N.groundset),
                )


def has_minor(M: Matroid, N: Matroid) -> Optional[MinorWitness]:
    return next(minor_witnesses(M, N), None)


def apply_witness(M: Matroid, witness: MinorWitness) -> Matroid:
    return minor(M, witness.contract, witness.delete)
