"""
Wheel Gluing Service for fanforge
Generalized parallel connection, blueprints, gluing wheels onto triangles,
the augmented matroid N+ and its core, and decomposition of fan-extensions
back into a blueprint over the core.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import HypothesisError, InputError, StructuralError
from .fans import (
    INTERNAL_PAIR,
    TERMINAL_RIM,
    TERMINAL_SPOKE,
    Fan,
    FanFamily,
    check_target,
    classify,
    covering_families,
    fan_contains_two_members,
    hereditarily_3conn_up_to_sp,
    is_consistent,
    is_fan,
    literal_embedding,
    literal_minor_partition,
    shortenings,
)
from .fields_repr import ReprMatroid, matrix_rank, normalize, row_reduce, subspace_intersection
from .matroid_core import (
    Matroid,
    MinorWitness,
    circuit_masks,
    closure,
    flat_masks,
    is_3connected,
    is_flat,
    is_isomorphic,
    is_modular_flat,
    minor_witnesses,
    rank,
    relabel,
    restrict,
)
from .wheels import wheel, whirl

logger = logging.getLogger(__name__)

__all__ = [
    "Blueprint",
    "CoreResult",
    "Decomposition",
    "FanPlus",
    "GlueResult",
    "core",
    "decompose",
    "fan_plus",
    "flats_law_holds",
    "glue_wheels",
    "gpc",
    "gpc_abstract",
    "is_fan_extension_by_gluing",
    "pi",
    "wheel",
    "wheel_labels",
    "whirl",
]

VERIFY_LIMIT = 12


def pi(M: Matroid, X: Iterable[str], Y: Iterable[str]) -> int:
    """
    r(X) + r(Y) - r(X | Y), the rank of the common span of X and Y.

    Raises:
        InputError: If X and Y overlap
    """
    X, Y = set(X), set(Y)
    if X & Y:
        raise InputError(f"pi needs disjoint sets, both contain {sorted(X & Y)}")
    return rank(M, X) + rank(M, Y) - rank(M, X | Y)


# ---------------------------------------------------------------------------
# Generalized parallel connection
# ---------------------------------------------------------------------------

def _solve(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """X with A X = B for square invertible A."""
    n = A.shape[0]
    R, pivots = row_reduce(np.hstack([A, B]), p)
    if pivots[:n] != list(range(n)):
        raise StructuralError("Basis matrix is singular")
    return R[:n, n:]


def _greedy_basis(matrix: np.ndarray, order: Sequence[int], p: int, start: Sequence[int] = ()) -> List[int]:
    chosen = list(start)
    r = matrix_rank(matrix[:, chosen], p) if chosen else 0
    for j in order:
        if j in chosen:
            continue
        trial = chosen + [j]
        if matrix_rank(matrix[:, trial], p) > r:
            chosen, r = trial, r + 1
    return chosen


def _proportional(u: np.ndarray, v: np.ndarray, p: int) -> bool:
    return bool(np.array_equal(normalize(u, p), normalize(v, p)))


def _check_attachment(M1: Matroid, M2: Matroid, T: Sequence[str]):
    """
    Raises:
        StructuralError: If the two restrictions to T differ or cl(T) is not modular in M2
    """
    if restrict(M1, T) != restrict(M2, T):
        raise StructuralError(f"Restrictions to {sorted(T)} disagree")
    # rank-2 wheels carry a rim element parallel to b, so T itself need not be closed
    if not is_modular_flat(M2, closure(M2, T)):
        raise StructuralError(f"{sorted(T)} does not span a modular flat of {M2.name or 'the attached matroid'}")


def gpc(R1: ReprMatroid, R2: ReprMatroid, verify: Optional[bool] = None, name: str = "") -> ReprMatroid:
    """
    Generalized parallel connection of two represented matroids across
    their common elements T, which must be a modular flat of R2.

    The two column spaces are placed in a common space meeting exactly in
    the span of T. When verify is set (default: small results) the flats
    of the result are checked against the flats law.

    Raises:
        InputError: If the fields differ
        StructuralError: If T is not modular in R2, or the two copies of T cannot be matched
    """
    if R1.p != R2.p:
        raise InputError(f"Cannot glue over {R1.field} and {R2.field}")
    p = R1.p
    T = [e for e in R2.labels if e in set(R1.labels)]
    _check_attachment(R1.restrict(T).matroid, R2.matroid, T)

    A1 = R1.reduced().matrix
    A2 = R2.reduced().matrix
    r1, r2 = A1.shape[0], A2.shape[0]
    t_idx2 = [R2.labels.index(e) for e in T]
    t_idx1 = [R1.labels.index(e) for e in T]
    B = _greedy_basis(A2, t_idx2, p)
    rT = len(B)
    full = _greedy_basis(A2, range(A2.shape[1]), p, start=B)
    extra = full[rT:]
    dim = r1 + r2 - rT
    def pad(v: np.ndarray) -> np.ndarray:
        return np.concatenate([v, np.zeros(dim - r1, dtype=np.int64)])

    coeffs = _solve(A2[:, full], A2, p)

    image = None
    for scales in itertools.product(range(1, p), repeat=max(rT - 1, 0)):
        scales = (1,) + scales
        Phi = np.zeros((dim, r2), dtype=np.int64)
        for k, j in enumerate(B):
            Phi[:, k] = (scales[k] * pad(A1[:, t_idx1[t_idx2.index(j)]])) % p
        for k in range(len(extra)):
            Phi[r1 + k, rT + k] = 1
        candidate = (Phi @ coeffs) % p
        if all(_proportional(candidate[:, j2], pad(A1[:, j1]), p) for j1, j2 in zip(t_idx1, t_idx2)):
            image = candidate
            break
    if image is None:
        raise StructuralError("The two copies of the attachment are not projectively equivalent")

    labels = list(R1.labels)
    columns = [pad(A1[:, j]) for j in range(A1.shape[1])]
    for j, e in enumerate(R2.labels):
        if e not in set(T):
            labels.append(e)
            columns.append(image[:, j])
    result = ReprMatroid(R1.field, labels, np.array(columns).T, name=name)

    if verify is None:
        verify = len(labels) <= VERIFY_LIMIT
    if verify and is_flat(R2.matroid, T) and not flats_law_holds(result.matroid, R1.matroid, R2.matroid):
        raise StructuralError("Glued matroid violates the flats law")
    return result


def _mask_map(P: Matroid, M: Matroid) -> List[Tuple[int, int]]:
    return [(P.index(e), M.index(e)) for e in M.groundset]


def _restrict_masks(masks: np.ndarray, pairs: List[Tuple[int, int]]) -> np.ndarray:
    out = np.zeros_like(masks)
    for i, j in pairs:
        out |= ((masks >> i) & 1) << j
    return out


def _flat_table(M: Matroid) -> np.ndarray:
    table = np.zeros(1 << M.size, dtype=bool)
    table[flat_masks(M)] = True
    return table


def flats_law_holds(P: Matroid, M1: Matroid, M2: Matroid) -> bool:
    """The flats of P are exactly the sets meeting E(M1) and E(M2) in flats."""
    if set(P.groundset) != set(M1.groundset) | set(M2.groundset):
        return False
    masks = np.arange(1 << P.size, dtype=np.int64)
    lawful = _flat_table(M1)[_restrict_masks(masks, _mask_map(P, M1))]
    lawful &= _flat_table(M2)[_restrict_masks(masks, _mask_map(P, M2))]
    return bool(np.array_equal(lawful, _flat_table(P)))


def gpc_abstract(M1: Matroid, M2: Matroid, name: str = "") -> Matroid:
    """
    Generalized parallel connection computed from the flats law: the
    closure of X is the least superset meeting each side in a flat.

    Raises:
        StructuralError: If the common elements are not a modular flat of M2
    """
    T = [e for e in M2.groundset if e in set(M1.groundset)]
    _check_attachment(M1, M2, T)
    E1, E2 = set(M1.groundset), set(M2.groundset)
    labels = list(M1.groundset) + [e for e in M2.groundset if e not in E1]

    def cl(X: frozenset) -> frozenset:
        current = set(X)
        while True:
            grown = current | closure(M1, current & E1) | closure(M2, current & E2)
            if grown == current:
                return frozenset(current)
            current = grown

    r = M1.rank + M2.rank - rank(M2, T)
    index = {e: i for i, e in enumerate(labels)}
    bases = []
    for B in itertools.combinations(labels, r):
        chosen = frozenset(B)
        if all(e not in cl(chosen - {e}) for e in B):
            bases.append(sum(1 << index[e] for e in B))
    return Matroid(labels, bases, name=name)


# ---------------------------------------------------------------------------
# Blueprints
# ---------------------------------------------------------------------------

def wheel_labels(i: int, r: int, a: str, b: str, c: str) -> Tuple[str, ...]:
    """
    Ground set of the i-th glued wheel in fan order x1, y1, ..., xr, yr with
    x1 = a, yr = b and xr = c.
    """
    labels = []
    for k in range(1, r + 1):
        labels.append(a if k == 1 else c if k == r else f"x{i}_{k}")
        labels.append(b if k == r else f"y{i}_{k}")
    return tuple(labels)


@dataclass(frozen=True)
class Blueprint:
    """A base matroid, triangles to glue wheels onto, wheel ranks, and a deletion set."""

    base: ReprMatroid = field(compare=False)
    triangles: Tuple[Tuple[str, str, str], ...] = ()
    ranks: Tuple[int, ...] = ()
    delete: frozenset = frozenset()

    def validate(self):
        """
        Raises:
            InputError: If a triangle, rank or deletion breaks the blueprint rules
        """
        if len(self.triangles) != len(self.ranks):
            raise InputError("Every triangle needs exactly one wheel rank")
        M = self.base.matroid
        tri = set(circuit_masks(M, 3))
        points = set()
        for i, (T, r) in enumerate(zip(self.triangles, self.ranks), start=1):
            if len(set(T)) != 3 or M.mask(T) not in tri:
                raise InputError(f"Triangle {i} {T} is not a triangle of the base")
            if r < 2:
                raise InputError(f"Wheel {i} has rank {r}, need at least 2")
            points |= set(T)
        if not set(self.delete) <= points:
            raise InputError("Only triangle points may be deleted after gluing")
        ends = {T[0] for T in self.triangles} | {T[2] for T in self.triangles}
        for i, (a, b, c) in enumerate(self.triangles, start=1):
            if b not in self.delete and b not in ends:
                raise InputError(f"Point {b} of triangle {i} must be deleted or be an end of another triangle")


@dataclass
class GlueResult:
    repr: ReprMatroid
    canonical_fans: List[Tuple[str, ...]]
    wheels: List[Tuple[str, ...]]

    @property
    def matroid(self) -> Matroid:
        return self.repr.matroid

    def family(self) -> FanFamily:
        return FanFamily.from_sequences(self.matroid, [F for F in self.canonical_fans if len(F) >= 3])


def glue_wheels(bp: Blueprint, verify: bool = False, name: str = "") -> GlueResult:
    """
    Glue a wheel of rank r(i) onto each triangle, then delete X.

    Raises:
        InputError: If the blueprint is invalid or wheel labels collide with the base
    """
    bp.validate()
    current = bp.base
    wheels, canonical = [], []
    for i, ((a, b, c), r) in enumerate(zip(bp.triangles, bp.ranks), start=1):
        labels = wheel_labels(i, r, a, b, c)
        clash = (set(labels) - {a, b, c}) & set(current.labels)
        if clash:
            raise InputError(f"Wheel {i} labels already in use: {sorted(clash)}")
        template = wheel(r, p=current.p)
        W = template.relabel(dict(zip(template.labels, labels)), name=f"wheel{r}")
        current = gpc(current, W, verify=verify)
        wheels.append(labels)
        canonical.append(tuple(e for e in labels[:-1] if e not in bp.delete))
    result = current.delete(bp.delete) if bp.delete else current
    result = ReprMatroid(result.field, result.labels, result.matrix, name=name or bp.base.name)
    logger.debug(f"Glued {len(wheels)} wheels: {len(result.labels)} elements, rank {result.rank}")
    return GlueResult(result, canonical, wheels)


# ---------------------------------------------------------------------------
# N+ and the core
# ---------------------------------------------------------------------------

@dataclass
class FanPlus:
    """The three attachment points of a fan and the fan extended to spoke ends."""

    fan: Tuple[str, ...]
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    labels: Tuple[str, str, str]
    plus: Tuple[str, ...]


def _meet_point(R: ReprMatroid, X: Sequence[str], Y: Sequence[str]) -> np.ndarray:
    meet = subspace_intersection(R.columns(X).T, R.columns(Y).T, R.p)
    if meet.shape[0] != 1:
        raise StructuralError(f"Span of {list(X)} meets the rest of the ground set in dimension {meet.shape[0]}, expected 1")
    return normalize(meet[0], R.p)


def fan_plus(N_repr: ReprMatroid, F, index: int = 1) -> FanPlus:
    """
    Attachment points a, b and c of a fan, and F+ (the fan with a prepended
    when it starts at a rim and c appended when it ends at a rim).

    Raises:
        InputError: If F is not a fan of N
        HypothesisError: If fewer than two elements lie outside the fan
        StructuralError: If the spoke/rim labeling is ambiguous or a meet is not a point
    """
    R = N_repr.reduced()
    M = R.matroid
    seq = F.seq if isinstance(F, Fan) else tuple(F)
    fan = is_fan(M, seq)
    if fan is None:
        raise InputError(f"({', '.join(seq)}) is not a fan")
    roles = classify(fan)
    rest = [e for e in R.labels if e not in set(seq)]
    if len(rest) < 2:
        raise HypothesisError(f"Fan ({', '.join(seq)}) leaves fewer than two elements outside")
    la, lb, lc = f"_a{index}", f"_b{index}", f"_c{index}"
    a = normalize(R.column(seq[0]), R.p) if roles[0].spoke else _meet_point(R, seq[:2], rest)
    c = normalize(R.column(seq[-1]), R.p) if roles[-1].spoke else _meet_point(R, seq[-2:], rest)
    b = _meet_point(R, [r.label for r in roles if r.rim], rest)
    plus = ((la,) if roles[0].rim else ()) + seq + ((lc,) if roles[-1].rim else ())
    return FanPlus(seq, a, b, c, (la, lb, lc), plus)


@dataclass
class CoreResult:
    core: ReprMatroid
    triangles: List[Tuple[str, str, str]]
    augmented: ReprMatroid
    fans_plus: List[FanPlus]
    parallel_to: Dict[str, str] = field(default_factory=dict)


def core(N_repr: ReprMatroid, F0) -> CoreResult:
    """
    Build N+ by adjoining a_i, b_i, c_i for each fan, then delete the fans
    and every other element parallel to some a_i or c_i.

    Raises:
        InputError: If the fans overlap or are not fans of N
        StructuralError: If some {a_i, b_i, c_i} is not a triangle of N+
    """
    R = N_repr.reduced()
    fans = [F.seq if isinstance(F, Fan) else tuple(F) for F in F0]
    covered = set()
    for F in fans:
        if covered & set(F):
            raise InputError("Fans must be pairwise disjoint")
        covered |= set(F)

    augmented = R
    plus, triangles = [], []
    for i, F in enumerate(fans, start=1):
        fp = fan_plus(R, F, index=i)
        plus.append(fp)
        la, lb, lc = fp.labels
        augmented = augmented.with_column(la, fp.a).with_column(lb, fp.b).with_column(lc, fp.c)
        triangles.append((la, lb, lc))

    parallel_to: Dict[str, str] = {}
    for e in R.labels:
        if e in covered:
            continue
        v = normalize(R.column(e), R.p)
        for fp in plus:
            la, _, lc = fp.labels
            if np.array_equal(v, fp.a):
                parallel_to.setdefault(e, la)
            elif np.array_equal(v, fp.c):
                parallel_to.setdefault(e, lc)

    result = augmented.delete(covered | set(parallel_to))
    result = ReprMatroid(result.field, result.labels, result.matrix, name=f"Core({N_repr.name})" if N_repr.name else "")
    M_plus = augmented.matroid
    for T in triangles:
        if rank(M_plus, T) != 2 or any(rank(M_plus, pair) < 2 for pair in itertools.combinations(T, 2)):
            raise StructuralError(f"{T} is not a triangle of N+")
    augmented = ReprMatroid(augmented.field, augmented.labels, augmented.matrix, name="N+")
    return CoreResult(result, triangles, augmented, plus, parallel_to)


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------

@dataclass
class Decomposition:
    """A blueprint over Core(N) and the relabeling that turns its gluing into M."""

    blueprint: Blueprint
    relabeling: Dict[str, str]
    base_family: Tuple[Tuple[str, ...], ...]
    family: Tuple[Tuple[str, ...], ...]
    canonical_fans: List[Tuple[str, ...]]
    witness: Optional[MinorWitness] = None

    def reglue(self) -> Matroid:
        glued = glue_wheels(self.blueprint)
        return relabel(glued.matroid, self.relabeling)


@dataclass(frozen=True)
class _Step:
    kind: str
    fan: Tuple[str, ...]
    position: int
    index: int


def _is_covering(M: Matroid, N: Matroid, F_N: FanFamily, family: List[Tuple[str, ...]]) -> bool:
    used = 0
    for seq in family:
        if is_fan(M, seq) is None:
            return False
        m = M.mask(seq)
        if used & m:
            return False
        used |= m
    if len(family) != len(F_N):
        return False
    if not all(any(is_consistent(F.seq, G) for G in family) for F in F_N):
        return False
    extras = M.full ^ M.mask(N.groundset)
    return extras & ~used == 0


def _oriented(seq: Tuple[str, ...], first: str) -> Tuple[str, ...]:
    return seq if seq[0] == first else seq[::-1]


class _Descent:
    def __init__(self, N: Matroid, F_N: FanFamily):
        self.N = N
        self.F_N = F_N
        self.keep = frozenset(N.groundset)
        self.failed = set()

    def run(self, M: Matroid, family: List[Tuple[str, ...]]):
        if M == self.N:
            return family, []
        if M.size <= self.N.size:
            return None
        key = (M, frozenset(min(F, F[::-1]) for F in family))
        if key in self.failed:
            return None
        for idx in reversed(range(len(family))):
            seq = family[idx]
            if len(seq) < 4:
                continue
            F = is_fan(M, seq)
            if F is None or F.ambiguous:
                continue
            for sh in shortenings(M, F, keep=self.keep):
                if literal_minor_partition(sh.matroid, self.N) is None:
                    continue
                smaller = family[:idx] + [sh.fan.seq] + family[idx + 1:]
                if not _is_covering(sh.matroid, self.N, self.F_N, smaller):
                    continue
                below = self.run(sh.matroid, smaller)
                if below is None:
                    continue
                base, steps = below
                if sh.kind == INTERNAL_PAIR:
                    r, s = sh.contracted[0], sh.deleted[0]
                    oriented = seq if seq.index(s) == seq.index(r) + 1 else seq[::-1]
                    position = oriented.index(r)
                else:
                    oriented = _oriented(seq, sh.removed[0])
                    position = 0
                return base, steps + [_Step(sh.kind, oriented, position, idx)]
        self.failed.add(key)
        return None


def _consecutive(slots: List[Optional[str]], part: Sequence[str]) -> Optional[int]:
    """Slot of part[0] if part occupies consecutive slots in order."""
    if not part or part[0] not in slots:
        return None
    start = slots.index(part[0])
    if slots[start:start + len(part)] == list(part):
        return start
    return None


def _replay(slots: List[Optional[str]], step: _Step) -> List[Optional[str]]:
    F, i = step.fan, step.position
    for flip in (False, True):
        o = list(reversed(slots)) if flip else list(slots)
        if step.kind == TERMINAL_SPOKE:
            if o[0] is None and _consecutive(o, F[1:]) == 1:
                o[0] = F[0]
            else:
                continue
        elif step.kind == TERMINAL_RIM:
            if _consecutive(o, F[1:]) == 0:
                o = [None, F[0]] + o
            else:
                continue
        else:
            rest = F[:i] + F[i + 2:]
            start = _consecutive(o, rest)
            if start is None:
                continue
            q = start + i
            o[q:q] = [F[i], F[i + 1]]
        return list(reversed(o)) if flip else o
    raise StructuralError(f"Cannot place the lengthening of ({', '.join(F)}) on a canonical fan")


def decompose(M: Matroid, N_repr: ReprMatroid, F_N: FanFamily, witness: Optional[MinorWitness] = None,
              class_guarantee: bool = False) -> Decomposition:
    """
    Express M as wheels glued onto Core(N), up to relabeling.

    Descends from M to N by shortenings that keep a covering family, takes
    the base family as F_0, and replays the moves as wheel-rank increments
    and deletion-set edits.

    Raises:
        HypothesisError: If N, F_N or M fail the decomposition hypotheses
        StructuralError: If no covering family of M leads down to N
    """
    N = N_repr.matroid
    check_target(N, F_N)
    if fan_contains_two_members(N, F_N):
        raise HypothesisError("Some fan of N contains two members of the fan family")
    if not is_3connected(M):
        raise HypothesisError(f"{M.name or 'M'} is not 3-connected")
    if not class_guarantee and not hereditarily_3conn_up_to_sp(M, N):
        raise HypothesisError(f"{M.name or 'M'} has a minor with an N-minor that is not 3-connected up to series and parallel sets")

    witnesses = [witness] if witness is not None else minor_witnesses(M, N)
    for w in witnesses:
        M_lit, back = literal_embedding(M, N, w)
        descent = _Descent(N, F_N)
        for family in covering_families(M_lit, N, F_N):
            top = [F.seq for F in family.fans]
            found = descent.run(M_lit, list(top))
            if found is None:
                continue
            base, steps = found
            try:
                result = _assemble(M, N_repr, base, steps, back)
            except StructuralError as e:
                logger.debug(f"Covering family did not assemble: {str(e)}")
                continue
            result.family = tuple(tuple(back.get(e, e) for e in F) for F in top)
            result.witness = w
            return result
    raise StructuralError(f"{M.name or 'M'} has no covering family that shortens to N")


def _assemble(M: Matroid, N_repr: ReprMatroid, base: List[Tuple[str, ...]], steps: List[_Step],
              back: Dict[str, str]) -> Decomposition:
    cr = core(N_repr, base)
    wheels: List[List[Optional[str]]] = []
    for fp in cr.fans_plus:
        la, _, lc = fp.labels
        wheels.append([None if e in (la, lc) else e for e in fp.plus])
    for e, point in cr.parallel_to.items():
        for i, (la, _, lc) in enumerate(cr.triangles):
            if point == la and wheels[i][0] is None:
                wheels[i][0] = e
                break
            if point == lc and wheels[i][-1] is None:
                wheels[i][-1] = e
                break
        else:
            raise StructuralError(f"No free attachment point for {e}")

    for step in steps:
        wheels[step.index] = _replay(wheels[step.index], step)

    relabeling: Dict[str, str] = {e: e for e in cr.core.labels if e in set(N_repr.labels)}
    ranks, canonical, deleted = [], [], set()
    for i, (slots, (la, lb, lc)) in enumerate(zip(wheels, cr.triangles), start=1):
        r = (len(slots) + 1) // 2
        ranks.append(r)
        labels = wheel_labels(i, r, la, lb, lc)
        for glue_label, e in zip(labels[:-1], slots):
            if e is None:
                deleted.add(glue_label)
            else:
                relabeling[glue_label] = e
        deleted.add(lb)
        canonical.append(tuple(e for e in slots if e is not None))
    deleted -= set(relabeling)
    bp = Blueprint(cr.core, tuple(cr.triangles), tuple(ranks), frozenset(deleted))
    relabeling = {k: back.get(v, v) for k, v in relabeling.items()}
    result = Decomposition(
        blueprint=bp,
        relabeling=relabeling,
        base_family=tuple(base),
        family=(),
        canonical_fans=[tuple(back.get(e, e) for e in F) for F in canonical],
    )
    if result.reglue() != M:
        raise StructuralError("Re-glued blueprint does not reproduce the input matroid")
    logger.info(f"Decomposed {M.name or 'matroid'} into {len(ranks)} wheels of ranks {ranks}")
    return result


def is_fan_extension_by_gluing(M: Matroid, N_repr: ReprMatroid, F_N: FanFamily, class_guarantee: bool = False) -> bool:
    """Decompose M and check the re-glued matroid is isomorphic to M."""
    try:
        d = decompose(M, N_repr, F_N, class_guarantee=class_guarantee)
    except StructuralError as e:
        logger.debug(f"No gluing decomposition: {str(e)}")
        return False
    return is_isomorphic(d.reglue(), M) is not None
