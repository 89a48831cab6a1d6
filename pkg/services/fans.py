"""
Fan Service for fanforge
Fans, fan-lengthening and fan-shortening moves, covering families, and the
fan-extension recognizer.

A fan is an ordered sequence whose consecutive 3-element windows alternate
between triangles and triads. The recognizer decides whether a matroid can
be grown from a target minor N by fan-lengthening moves, each applied to a
fan that belongs to a covering family of the current matroid.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .exceptions import HypothesisError, InputError, ResourceAbort, StructuralError
from .fields_repr import ReprMatroid, coextensions, extensions, fresh_label
from .matroid_core import (
    Matroid,
    MinorWitness,
    apply_witness,
    circuit_masks,
    contract,
    delete,
    has_minor,
    is_3conn_up_to_sp,
    is_3connected,
    iso_key,
    isomorphisms,
    minor,
    minor_witnesses,
    relabel,
)
from .wheels import is_wheel_or_whirl

logger = logging.getLogger(__name__)

TERMINAL_SPOKE = "terminal-spoke"
TERMINAL_RIM = "terminal-rim"
INTERNAL_PAIR = "internal-pair"


# ---------------------------------------------------------------------------
# Fans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fan:
    """
    A fan of a host matroid.

    `triangle_first` records whether the first window is a triangle;
    `ambiguous` is set when both alternations fit, which only happens in
    hosts where some triangle is also a triad.
    """

    host: Matroid = field(compare=False, repr=False)
    seq: Tuple[str, ...]
    triangle_first: bool
    ambiguous: bool = False
    maximal: bool = False

    def __len__(self) -> int:
        return len(self.seq)

    def __iter__(self):
        return iter(self.seq)

    @property
    def elements(self) -> frozenset:
        return frozenset(self.seq)

    @property
    def mask(self) -> int:
        return self.host.mask(self.seq)

    def is_spoke(self, position: int) -> bool:
        return (position % 2 == 0) == self.triangle_first

    @property
    def spokes(self) -> Tuple[str, ...]:
        return tuple(e for i, e in enumerate(self.seq) if self.is_spoke(i))

    @property
    def rims(self) -> Tuple[str, ...]:
        return tuple(e for i, e in enumerate(self.seq) if not self.is_spoke(i))

    def reversed(self) -> "Fan":
        keeps = len(self.seq) % 2 == 1
        return Fan(
            self.host,
            tuple(reversed(self.seq)),
            self.triangle_first if keeps else not self.triangle_first,
            self.ambiguous,
            self.maximal,
        )

    def __str__(self) -> str:
        return "(" + ", ".join(self.seq) + ")"


@dataclass(frozen=True)
class ElementRole:
    label: str
    spoke: bool
    terminal: bool

    @property
    def rim(self) -> bool:
        return not self.spoke


def window_kinds(M: Matroid, seq: Sequence[str]) -> List[Tuple[bool, bool]]:
    tri, triad = M.circuit_table, M.dual.circuit_table
    kinds = []
    for i in range(len(seq) - 2):
        w = M.mask(seq[i:i + 3])
        kinds.append((bool(tri[w]), bool(triad[w])))
    return kinds


def feasible_parities(kinds: List[Tuple[bool, bool]]) -> List[bool]:
    out = []
    for triangle_first in (True, False):
        if all(k[0] if (i % 2 == 0) == triangle_first else k[1] for i, k in enumerate(kinds)):
            out.append(triangle_first)
    return out


def is_fan(M: Matroid, seq: Sequence[str]) -> Optional[Fan]:
    """
    The fan on seq, or None if the windows do not alternate.

    Raises:
        InputError: If seq names an element outside E(M)
    """
    seq = tuple(seq)
    M.mask(seq)
    if len(seq) < 3 or len(set(seq)) != len(seq):
        return None
    parities = feasible_parities(window_kinds(M, seq))
    if not parities:
        return None
    return Fan(M, seq, parities[0], ambiguous=len(parities) == 2)


def classify(F: Fan) -> List[ElementRole]:
    """
    Spoke/rim and terminal/internal label of every fan element.

    Raises:
        StructuralError: If the host admits both alternations for this fan
    """
    if F.ambiguous:
        raise StructuralError(f"Fan {F} has no unambiguous spoke/rim labeling in {F.host.name or 'its host'}")
    n = len(F.seq)
    return [ElementRole(e, F.is_spoke(i), i in (0, n - 1)) for i, e in enumerate(F.seq)]


def _all_fans(M: Matroid) -> List[Fan]:
    def compute():
        tri = set(circuit_masks(M, 3))
        triad = set(circuit_masks(M.dual, 3))
        found: Dict[Tuple[int, ...], List[bool]] = {}

        def grow(seq: List[int], used: int, parities: List[bool]):
            if len(seq) >= 3 and seq[0] < seq[-1]:
                found[tuple(seq)] = parities
            k = len(seq) - 2
            pair = (1 << seq[-2]) | (1 << seq[-1])
            for d in range(M.size):
                if (used >> d) & 1:
                    continue
                w = pair | (1 << d)
                nxt = [p for p in parities if (w in tri if (k % 2 == 0) == p else w in triad)]
                if nxt:
                    grow(seq + [d], used | (1 << d), nxt)

        for w in sorted(tri | triad):
            bits = [i for i in range(M.size) if (w >> i) & 1]
            parities = [p for p in (True, False) if (w in tri if p else w in triad)]
            for a, b, c in itertools.permutations(bits):
                grow([a, b, c], w, parities)

        masks = {}
        for seq in found:
            masks[seq] = sum(1 << i for i in seq)
        distinct = set(masks.values())
        fans = []
        for seq in sorted(found):
            m = masks[seq]
            maximal = not any(other != m and other & m == m for other in distinct)
            parities = found[seq]
            fans.append(Fan(M, tuple(M.groundset[i] for i in seq), parities[0],
                            ambiguous=len(parities) == 2, maximal=maximal))
        return fans

    return M.memo("fans", compute)


def enumerate_fans(M: Matroid, min_len: int = 3) -> List[Fan]:
    """All fans of M up to reversal, with the lower-index endpoint first."""
    return [F for F in _all_fans(M) if len(F) >= min_len]


def _as_seq(F) -> Tuple[str, ...]:
    return F.seq if isinstance(F, Fan) else tuple(F)


def _is_subsequence(small: Sequence[str], big: Sequence[str]) -> bool:
    it = iter(big)
    return all(e in it for e in small)


def is_consistent(F, G) -> bool:
    """F is a (not necessarily contiguous) subsequence of G or of G reversed."""
    F, G = _as_seq(F), _as_seq(G)
    return _is_subsequence(F, G) or _is_subsequence(F, G[::-1])


def _blocks(G: Sequence[str], m: int) -> Iterator[Tuple[str, ...]]:
    for i in range(len(G) - m + 1):
        yield tuple(G[i:i + m])


def is_enclosed(F, G) -> bool:
    """F or its reversal equals a contiguous block of G."""
    F, G = _as_seq(F), _as_seq(G)
    return any(block == F or block == F[::-1] for block in _blocks(G, len(F)))


def is_contiguous(F, G) -> bool:
    """The elements of F are exactly the elements of a contiguous block of G."""
    F, G = _as_seq(F), _as_seq(G)
    target = frozenset(F)
    return any(frozenset(block) == target for block in _blocks(G, len(F)))


@dataclass(frozen=True)
class FanFamily:
    """Pairwise disjoint fans of one host."""

    host: Matroid = field(compare=False, repr=False)
    fans: Tuple[Fan, ...] = ()

    @classmethod
    def from_sequences(cls, host: Matroid, sequences: Iterable[Sequence[str]]) -> "FanFamily":
        """
        Raises:
            InputError: If a sequence is not a fan of host or two fans meet
        """
        fans = []
        used = set()
        for seq in sequences:
            F = is_fan(host, seq)
            if F is None:
                raise InputError(f"({', '.join(seq)}) is not a fan of {host.name or 'the target'}")
            if used & F.elements:
                raise InputError("Fans in a family must be pairwise disjoint")
            used |= F.elements
            fans.append(F)
        return cls(host, tuple(fans))

    @property
    def sequences(self) -> List[Tuple[str, ...]]:
        return [F.seq for F in self.fans]

    def __len__(self) -> int:
        return len(self.fans)

    def __iter__(self):
        return iter(self.fans)


@dataclass(frozen=True)
class CoveringFamily:
    """Fans of a host satisfying the four covering conditions relative to (N, F_N)."""

    family: FanFamily
    target: Matroid = field(compare=False, repr=False)
    target_fans: Tuple[Tuple[str, ...], ...] = ()

    @property
    def fans(self) -> Tuple[Fan, ...]:
        return self.family.fans

    def index_of(self, F) -> Optional[int]:
        seq = _as_seq(F)
        for i, G in enumerate(self.family.fans):
            if G.seq == seq or G.seq == seq[::-1]:
                return i
        return None


def fan_contains_two_members(N: Matroid, F_N: FanFamily) -> bool:
    """Some fan of N contains two distinct members of F_N as sets."""
    members = [N.mask(F.seq) for F in F_N]
    if len(members) < 2:
        return False
    for G in enumerate_fans(N):
        m = G.mask
        if sum(1 for f in members if f & m == f) >= 2:
            return True
    return False


# ---------------------------------------------------------------------------
# Covering families
# ---------------------------------------------------------------------------

def _covering_search(M: Matroid, extras: int, targets: List[Tuple[str, ...]],
                     required: Optional[Fan] = None) -> Iterator[Tuple[Fan, ...]]:
    fans = enumerate_fans(M)
    k = len(targets)
    candidates = [[F for F in fans if is_consistent(t, F.seq)] for t in targets]
    seen = set()

    def fill(chosen: List[Fan], used: int, start: int) -> Iterator[Tuple[Fan, ...]]:
        need = k - len(chosen)
        if need == 0:
            if extras & ~used == 0:
                yield tuple(chosen)
            return
        for j in range(start, len(fans)):
            F = fans[j]
            m = F.mask
            if m & used:
                continue
            yield from fill(chosen + [F], used | m, j + 1)

    def assign(j: int, chosen: List[Fan], used: int) -> Iterator[Tuple[Fan, ...]]:
        if j == k:
            yield from fill(chosen, used, 0)
            return
        for F in chosen:
            if is_consistent(targets[j], F.seq):
                yield from assign(j + 1, chosen, used)
                break
        if len(chosen) < k:
            for F in candidates[j]:
                if F.mask & used:
                    continue
                yield from assign(j + 1, chosen + [F], used | F.mask)

    start = [required] if required is not None else []
    used = required.mask if required is not None else 0
    for family in assign(0, start, used):
        key = frozenset(min(F.seq, F.seq[::-1]) for F in family)
        if key in seen:
            continue
        seen.add(key)
        yield family


def covering_families(M: Matroid, N: Matroid, F_N: FanFamily,
                      witness: Optional[MinorWitness] = None,
                      required: Optional[Fan] = None) -> Iterator[CoveringFamily]:
    """
    All covering families of M relative to N and F_N, up to reversing fans.

    Without a witness, N must sit in M literally (E(N) a subset of E(M)).

    Raises:
        InputError: If the witness does not exhibit N as a minor of M
    """
    if witness is not None:
        mapping = witness.mapping
        if set(mapping) != set(N.groundset) or apply_witness(M, witness) != relabel(N, mapping):
            raise InputError("Minor witness does not exhibit N as a minor of M")
    else:
        missing = set(N.groundset) - set(M.groundset)
        if missing:
            raise InputError(f"N is not literally contained in M: missing {sorted(missing)}")
        mapping = {e: e for e in N.groundset}
    extras = M.full ^ M.mask(mapping.values())
    targets = [tuple(mapping[e] for e in F.seq) for F in F_N]
    for family in _covering_search(M, extras, targets, required=required):
        yield CoveringFamily(FanFamily(M, family), N, tuple(targets))


def has_covering_family(M: Matroid, N: Matroid, F_N: FanFamily, required: Optional[Fan] = None) -> bool:
    return next(covering_families(M, N, F_N, required=required), None) is not None


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Shortening:
    """M' with fan F' such that a lengthening move on F' gives back (M, F)."""

    matroid: Matroid = field(repr=False)
    fan: Fan
    kind: str
    contracted: Tuple[str, ...] = ()
    deleted: Tuple[str, ...] = ()

    @property
    def removed(self) -> Tuple[str, ...]:
        return self.contracted + self.deleted


def _orientations(F: Fan) -> Tuple[Fan, Fan]:
    return F, F.reversed()


def shortenings(M: Matroid, F: Fan, N: Optional[Matroid] = None,
                keep: Iterable[str] = frozenset()) -> List[Shortening]:
    """
    Every fan-shortening move on F, read as lengthening moves in reverse.

    Terminal moves need |F| >= 4 and internal moves |F| >= 5. Each result
    is 3-connected; elements in `keep` are never removed and, when N is
    given, each result keeps an N-minor.
    """
    keep = frozenset(keep)
    n = len(F)
    if n < 4 or F.ambiguous:
        return []
    out: List[Shortening] = []
    seen = set()

    def attempt(candidate: Matroid, rest: Tuple[str, ...], kind: str, contracted=(), deleted=()):
        key = (kind, contracted, deleted)
        if key in seen:
            return
        seen.add(key)
        if not is_3connected(candidate):
            return
        fan = is_fan(candidate, rest)
        if fan is None:
            return
        if N is not None and has_minor(candidate, N) is None:
            return
        out.append(Shortening(candidate, fan, kind, tuple(contracted), tuple(deleted)))

    for G in _orientations(F):
        seq = G.seq
        first = seq[0]
        if first not in keep:
            if G.is_spoke(0):
                attempt(delete(M, [first]), seq[1:], TERMINAL_SPOKE, deleted=(first,))
            else:
                attempt(contract(M, [first]), seq[1:], TERMINAL_RIM, contracted=(first,))
        if n >= 5:
            for i in range(n - 1):
                if G.is_spoke(i):
                    continue
                r, s = seq[i], seq[i + 1]
                if r in keep or s in keep:
                    continue
                attempt(minor(M, [r], [s]), seq[:i] + seq[i + 2:], INTERNAL_PAIR, contracted=(r,), deleted=(s,))
    return out


@dataclass(frozen=True)
class Lengthening:
    """A represented matroid obtained by one fan-lengthening move."""

    repr: ReprMatroid = field(repr=False)
    fan: Fan
    kind: str
    added: Tuple[str, ...]


def lengthenings(R: ReprMatroid, F) -> List[Lengthening]:
    """
    Every fan-lengthening move on F that stays representable over R's field.

    Spokes are added by single-element extensions, rims by coextensions,
    and an internal rim/spoke pair by an extension followed by a
    coextension. Each result is 3-connected.
    """
    seq = _as_seq(F)
    orientations = (seq, seq[::-1])
    out: List[Lengthening] = []

    for E1 in extensions(R):
        s = E1.labels[-1]
        M1 = E1.matroid
        if is_3connected(M1):
            for orient in orientations:
                fan = is_fan(M1, (s,) + orient)
                if fan is not None and fan.triangle_first and not fan.ambiguous:
                    out.append(Lengthening(E1, fan, TERMINAL_SPOKE, (s,)))
        if len(seq) < 3:
            continue
        for C2 in coextensions(E1, label=fresh_label(E1.labels)):
            r = C2.labels[-1]
            M2 = C2.matroid
            if not is_3connected(M2):
                continue
            for orient in orientations:
                for i in range(len(orient) + 1):
                    candidate = orient[:i] + (r, s) + orient[i:]
                    fan = is_fan(M2, candidate)
                    if fan is not None and not fan.ambiguous and not fan.is_spoke(i):
                        out.append(Lengthening(C2, fan, INTERNAL_PAIR, (r, s)))

    for C1 in coextensions(R):
        r = C1.labels[-1]
        M1 = C1.matroid
        if not is_3connected(M1):
            continue
        for orient in orientations:
            fan = is_fan(M1, (r,) + orient)
            if fan is not None and not fan.triangle_first and not fan.ambiguous:
                out.append(Lengthening(C1, fan, TERMINAL_RIM, (r,)))
    return out


# ---------------------------------------------------------------------------
# Recognizer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """
    One fan-lengthening move of a trace, in the labels of the final matroid.
    `elements` is the ground set after the move; `matroid` is that minor.
    """

    kind: str
    added: Tuple[str, ...]
    fan_index: int
    fan: Tuple[str, ...]
    elements: Tuple[str, ...] = ()
    matroid: Optional[Matroid] = field(default=None, compare=False, repr=False)

    def line(self) -> str:
        text = f"lengthen {self.kind} {' '.join(self.added)} at {self.fan_index}"
        if self.elements:
            text += f" giving {{{' '.join(self.elements)}}}"
        return text


@dataclass
class FanExtensionResult:
    decision: bool
    trace: List[Move] = field(default_factory=list)
    witness: Optional[MinorWitness] = None
    shortcut: bool = False

    def lines(self) -> List[str]:
        return [m.line() for m in self.trace]

    def __bool__(self) -> bool:
        return self.decision


def check_target(N: Matroid, F_N: FanFamily):
    """
    Raises:
        HypothesisError: If N is not a legal target
    """
    if N.size < 4:
        raise HypothesisError(f"{N.name or 'N'} has fewer than four elements")
    if not is_3connected(N):
        raise HypothesisError(f"{N.name or 'N'} is not 3-connected")
    if is_wheel_or_whirl(N):
        raise HypothesisError(f"{N.name or 'N'} must be neither a wheel nor a whirl")
    for F in F_N:
        if is_fan(N, F.seq) is None:
            raise HypothesisError(f"{F} is not a fan of {N.name or 'N'}")


def literal_minor_partition(M: Matroid, N: Matroid) -> Optional[Tuple[Tuple[str, ...], Tuple[str, ...]]]:
    """(contract, delete) with M / contract \\ delete == N exactly, if any."""
    if not set(N.groundset) <= set(M.groundset):
        return None
    extras = [e for e in M.groundset if e not in set(N.groundset)]
    kc = M.rank - N.rank
    if kc < 0 or kc > len(extras):
        return None
    for C in itertools.combinations(extras, kc):
        D = tuple(e for e in extras if e not in C)
        if minor(M, C, D) == N:
            return C, D
    return None


def literal_embedding(M: Matroid, N: Matroid, witness: MinorWitness) -> Tuple[Matroid, Dict[str, str]]:
    """
    Relabel M so the witness image of N carries N's labels.

    Returns:
        (relabeled M, map from new labels back to M's labels)
    """
    forward = {m: n for n, m in witness.embedding}
    taken = set(M.groundset) | set(N.groundset)
    for e in M.groundset:
        if e not in forward and e in set(N.groundset):
            fresh = fresh_label(taken)
            taken.add(fresh)
            forward[e] = fresh
    back = {v: k for k, v in forward.items()}
    return relabel(M, forward), back


@dataclass
class _SearchContext:
    N: Matroid
    F_N: FanFamily
    keep: frozenset
    memo: Dict[Matroid, Optional[List[Move]]] = field(default_factory=dict)
    nodes: int = 0


class FanExtensionService:
    """
    Decides fan-extension membership by backward search over shortenings.

    Each search node is a matroid that contains N literally. A node is
    reachable when it equals N, or when some shortening on a fan with |F| >= 4
    lands on a reachable matroid whose covering family contains the
    shortened fan.
    """

    def __init__(self, node_cap: int = 200_000):
        """
        Args:
            node_cap: Ceiling on distinct search nodes per call
        """
        self.node_cap = node_cap

    def is_fan_extension(self, M: Matroid, N: Matroid, F_N: FanFamily) -> FanExtensionResult:
        """
        Decide whether M is a fan-extension of N relative to F_N.

        Every minor witness of N in M is tried before answering no.

        Raises:
            HypothesisError: If N is not 3-connected, is a wheel or whirl, or is too small
            ResourceAbort: If the search exceeds node_cap
        """
        check_target(N, F_N)
        if not is_3connected(M):
            return FanExtensionResult(False)
        ctx = _SearchContext(N, F_N, frozenset(N.groundset))
        for witness in minor_witnesses(M, N):
            M_lit, back = literal_embedding(M, N, witness)
            trace = self._search(M_lit, ctx)
            if trace is not None:
                moves = [self._in_labels_of_M(m, back) for m in trace]
                logger.debug(f"Fan-extension found after {ctx.nodes} nodes")
                return FanExtensionResult(True, moves, witness)
        logger.debug(f"No fan-extension after {ctx.nodes} nodes")
        return FanExtensionResult(False)

    @staticmethod
    def _in_labels_of_M(m: Move, back: Dict[str, str]) -> Move:
        def to_M(labels):
            return tuple(back.get(e, e) for e in labels)

        step = relabel(m.matroid, {e: back.get(e, e) for e in m.matroid.groundset})
        return Move(m.kind, to_M(m.added), m.fan_index, to_M(m.fan), to_M(m.elements), step)

    def _search(self, M: Matroid, ctx: _SearchContext) -> Optional[List[Move]]:
        if M in ctx.memo:
            return ctx.memo[M]
        ctx.nodes += 1
        if ctx.nodes > self.node_cap:
            raise ResourceAbort(f"Fan-extension search exceeded {self.node_cap} nodes")
        if ctx.nodes % 1000 == 0:
            logger.debug(f"Recognizer visited {ctx.nodes} nodes")

        result: Optional[List[Move]] = None
        if M == ctx.N:
            result = []
        elif M.size > ctx.N.size and is_3connected(M) and has_covering_family(M, ctx.N, ctx.F_N):
            tried = set()
            for F in enumerate_fans(M, 4):
                for sh in shortenings(M, F, keep=ctx.keep):
                    key = (sh.kind, sh.contracted, sh.deleted, min(sh.fan.seq, sh.fan.seq[::-1]))
                    if key in tried:
                        continue
                    tried.add(key)
                    if literal_minor_partition(sh.matroid, ctx.N) is None:
                        continue
                    family = next(covering_families(sh.matroid, ctx.N, ctx.F_N, required=sh.fan), None)
                    if family is None:
                        continue
                    below = self._search(sh.matroid, ctx)
                    if below is not None:
                        result = below + [Move(sh.kind, sh.removed, family.index_of(sh.fan), F.seq, M.groundset, M)]
                        break
                if result is not None:
                    break
        ctx.memo[M] = result
        return result

    def covering_family_shortcut(self, M: Matroid, N: Matroid, F_N: FanFamily,
                                 class_guarantee: bool = False) -> Optional[bool]:
        """
        True when M has a covering family and the shortcut hypotheses hold;
        None when the full search is needed.

        The hypotheses: N is neither a wheel nor a whirl, no fan of N contains
        two members of F_N, M is 3-connected, and every minor of M with an
        N-minor is 3-connected up to series and parallel sets. The last one
        is checked exhaustively unless the caller vouches for it.
        """
        if is_wheel_or_whirl(N) or fan_contains_two_members(N, F_N):
            return None
        if not is_3connected(M):
            return None
        if not class_guarantee and not hereditarily_3conn_up_to_sp(M, N):
            return None
        for witness in minor_witnesses(M, N):
            M_lit, _ = literal_embedding(M, N, witness)
            if has_covering_family(M_lit, N, F_N):
                return True
        return None


def hereditarily_3conn_up_to_sp(M: Matroid, N: Matroid) -> bool:
    """Every minor of M that has an N-minor is 3-connected up to series and parallel sets."""
    k = M.size - N.size
    for size in range(0, k + 1):
        for removed in itertools.combinations(M.groundset, size):
            for split in range(1 << size):
                C = [e for i, e in enumerate(removed) if (split >> i) & 1]
                D = [e for i, e in enumerate(removed) if not (split >> i) & 1]
                P = minor(M, C, D)
                if has_minor(P, N) is not None and not is_3conn_up_to_sp(P):
                    return False
    return True


def is_fan_extension(M: Matroid, N: Matroid, F_N: FanFamily, node_cap: int = 200_000) -> FanExtensionResult:
    return FanExtensionService(node_cap=node_cap).is_fan_extension(M, N, F_N)


# ---------------------------------------------------------------------------
# Forward generation
# ---------------------------------------------------------------------------

@dataclass
class ForwardExtension:
    repr: ReprMatroid
    trace: List[Move] = field(default_factory=list)


def forward_fan_extensions(N_repr: ReprMatroid, F_N: FanFamily, max_added: int = 2) -> List[ForwardExtension]:
    """
    Every fan-extension of N with at most max_added new elements that the
    representation's field reaches, one per isomorphism class fixing E(N).
    """
    N = N_repr.matroid
    fixed = {e: e for e in N.groundset}
    buckets: Dict[tuple, List[Matroid]] = {}

    def is_new(M: Matroid) -> bool:
        bucket = buckets.setdefault((M.size, iso_key(M)), [])
        for other in bucket:
            if next(isomorphisms(M, other, fixed=fixed), None) is not None:
                return False
        bucket.append(M)
        return True

    is_new(N)
    results = [ForwardExtension(N_repr, [])]
    frontier = list(results)
    while frontier:
        nxt = []
        for item in frontier:
            M = item.repr.matroid
            for family in covering_families(M, N, F_N):
                for index, F in enumerate(family.fans):
                    for step in lengthenings(item.repr, F):
                        grown = step.repr.matroid
                        if grown.size - N.size > max_added or not is_new(grown):
                            continue
                        move = Move(step.kind, step.added, index, step.fan.seq, step.repr.labels, step.repr.matroid)
                        child = ForwardExtension(step.repr, item.trace + [move])
                        results.append(child)
                        nxt.append(child)
        frontier = nxt
    logger.info(f"Forward generation reached {len(results)} fan-extensions of {N.name or 'N'}")
    return results
