"""
Fan Property Checks for fanforge
Executable versions of the structural facts about fans that the recognizer
and the wheel-gluing construction rely on. Each checker returns the list of
violations it finds; an empty list means the property held on that matroid.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional

from .fans import (
    enumerate_fans,
    feasible_parities,
    hereditarily_3conn_up_to_sp,
    is_contiguous,
    is_fan,
    window_kinds,
)
from .matroid_core import (
    Matroid,
    circuit_masks,
    has_minor,
    is_3connected,
    is_isomorphic,
    lambda_,
    minor,
)
from .wheels import is_wheel_or_whirl

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    check: str
    matroid: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.check}] {self.matroid}: {self.detail}"


def _name(M: Matroid) -> str:
    return M.name or f"<{M.size} elements, rank {M.rank}>"


def _is_generic_host(M: Matroid) -> bool:
    """3-connected, at least four elements, neither a wheel nor a whirl."""
    return M.size >= 4 and is_3connected(M) and not is_wheel_or_whirl(M)


def _triangles_in(M: Matroid, mask: int) -> List[int]:
    return [T for T in circuit_masks(M, 3) if T & mask == T]


# ---------------------------------------------------------------------------
# Facts about fans in a single matroid
# ---------------------------------------------------------------------------

def check_fan_separation(M: Matroid) -> List[Violation]:
    """Every fan is 3-separating."""
    out = []
    for F in enumerate_fans(M):
        if lambda_(M, F.seq) > 2:
            out.append(Violation("fan-separation", _name(M), f"lambda{F} = {lambda_(M, F.seq)}"))
    return out


def check_internal_shortening(M: Matroid) -> List[Violation]:
    """
    In a 3-connected M, removing a rim e_i and its successor from a fan with
    at least five elements leaves a fan of M / e_i \\ e_{i+1} with the same
    spoke and rim labels.
    """
    if not is_3connected(M):
        return []
    out = []
    for F in enumerate_fans(M, 5):
        if F.ambiguous:
            continue
        for G in (F, F.reversed()):
            seq = G.seq
            for i in range(len(seq) - 1):
                if G.is_spoke(i):
                    continue
                rest = seq[:i] + seq[i + 2:]
                smaller = minor(M, [seq[i]], [seq[i + 1]])
                if G.triangle_first not in feasible_parities(window_kinds(smaller, rest)):
                    out.append(Violation(
                        "internal-shortening", _name(M),
                        f"removing {seq[i]}, {seq[i + 1]} from {G} breaks the fan",
                    ))
    return out


def check_external_triangles(M: Matroid) -> List[Violation]:
    """
    A triangle made of one outside element and two fan elements sits at an
    end of the fan (extending it), joins two terminal spokes, or straddles
    a short fan in one of two fixed positions.
    """
    if not is_3connected(M):
        return []
    out = []
    for F in enumerate_fans(M, 4):
        if F.ambiguous:
            continue
        seq, n = F.seq, len(F)
        position = {e: i for i, e in enumerate(seq)}
        for T in circuit_masks(M, 3):
            labels = M.labels(T)
            outside = [e for e in labels if e not in position]
            if len(outside) != 1:
                continue
            e = outside[0]
            x, y = sorted(position[f] for f in labels if f != e)
            allowed = (
                (x, y) == (0, 1) and not F.is_spoke(0) and is_fan(M, (e,) + seq) is not None
                or (x, y) == (n - 2, n - 1) and not F.is_spoke(n - 1) and is_fan(M, seq + (e,)) is not None
                or (x, y) == (0, n - 1) and F.is_spoke(0) and F.is_spoke(n - 1)
                or (x, y) == (1, 3) and not F.is_spoke(1) and n <= 5
                or (x, y) == (n - 4, n - 2) and not F.is_spoke(n - 2) and n <= 5
            )
            if not allowed:
                out.append(Violation("external-triangle", _name(M), f"{{{e}, {seq[x]}, {seq[y]}}} against {F}"))
    return out


def check_small_host(M: Matroid) -> List[Violation]:
    """A 3-connected matroid with at most one element outside a fan is a wheel or a whirl."""
    if M.size < 4 or not is_3connected(M):
        return []
    longest = max((len(F) for F in enumerate_fans(M)), default=0)
    if longest and M.size <= longest + 1 and not is_wheel_or_whirl(M):
        return [Violation("small-host", _name(M), f"fan of length {longest} in {M.size} elements")]
    return []


def check_external_element(M: Matroid) -> List[Violation]:
    """
    An outside element that closes a triangle and a triad against one fan,
    sharing a fan element, forces a wheel or a whirl.
    """
    if M.size < 4 or not is_3connected(M) or is_wheel_or_whirl(M):
        return []
    tri = circuit_masks(M, 3)
    triad = circuit_masks(M.dual, 3)
    out = []
    for F in enumerate_fans(M):
        fmask = F.mask
        for d in range(M.size):
            bit = 1 << d
            if fmask & bit:
                continue
            touching_tri = [T ^ bit for T in tri if T & bit and (T ^ bit) & fmask == T ^ bit]
            touching_triad = [T ^ bit for T in triad if T & bit and (T ^ bit) & fmask == T ^ bit]
            if any(a & b for a in touching_tri for b in touching_triad):
                out.append(Violation("external-element", _name(M), f"{M.groundset[d]} against {F}"))
    return out


def check_triangles_in_fans(M: Matroid) -> List[Violation]:
    """A triangle inside a fan is a window of three consecutive elements starting at a spoke."""
    if not _is_generic_host(M):
        return []
    out = []
    for F in enumerate_fans(M):
        if F.ambiguous:
            continue
        windows = {
            M.mask(F.seq[i:i + 3]) for i in range(len(F) - 2) if F.is_spoke(i)
        }
        for T in _triangles_in(M, F.mask):
            if T not in windows:
                out.append(Violation("triangle-in-fan", _name(M), f"{set(M.labels(T))} inside {F}"))
    return out


def check_separators_in_fans(M: Matroid) -> List[Violation]:
    """A 3-separating subset of a fan with at least three elements is contiguous in it."""
    if not _is_generic_host(M):
        return []
    out = []
    for F in enumerate_fans(M):
        for k in range(3, len(F) + 1):
            for X in itertools.combinations(F.seq, k):
                if lambda_(M, X) <= 2 and not is_contiguous(X, F.seq):
                    out.append(Violation("separator-in-fan", _name(M), f"{set(X)} inside {F}"))
    return out


def check_fan_overlaps(M: Matroid) -> List[Violation]:
    """Two fans sharing at least three elements meet in a block contiguous in both."""
    if not _is_generic_host(M):
        return []
    fans = enumerate_fans(M)
    out = []
    for F, G in itertools.combinations(fans, 2):
        common = F.mask & G.mask
        if bin(common).count("1") < 3:
            continue
        X = M.labels(common)
        if not (is_contiguous(X, F.seq) and is_contiguous(X, G.seq)):
            out.append(Violation("fan-overlap", _name(M), f"{F} and {G} meet in {set(X)}"))
    return out


# ---------------------------------------------------------------------------
# Facts about matroids in a class with an N-minor
# ---------------------------------------------------------------------------

def in_target_class(M: Matroid, N: Matroid) -> bool:
    """
    M has an N-minor and every minor of M with an N-minor is 3-connected up
    to series and parallel sets, with N a legal target.
    """
    def compute():
        if N.size < 4 or not is_3connected(N) or is_wheel_or_whirl(N):
            return False
        return has_minor(M, N) is not None and hereditarily_3conn_up_to_sp(M, N)

    return M.memo(("in_class", N), compute)


def check_triangle_triad_independence(M: Matroid, N: Matroid) -> List[Violation]:
    """Triangles are coindependent and triads are independent."""
    if not in_target_class(M, N):
        return []
    out = []
    coindependent = M.dual.independent_table
    independent = M.independent_table
    for T in circuit_masks(M, 3):
        if not coindependent[T]:
            out.append(Violation("triangle-triad-independence", _name(M), f"triangle {set(M.labels(T))} is codependent"))
    for T in circuit_masks(M.dual, 3):
        if not independent[T]:
            out.append(Violation("triangle-triad-independence", _name(M), f"triad {set(M.labels(T))} is dependent"))
    return out


def check_u24_restrictions(M: Matroid, N: Matroid) -> List[Violation]:
    """A U2,4-restriction meets no triad."""
    if not in_target_class(M, N):
        return []
    tri = set(circuit_masks(M, 3))
    lines = set()
    for a, b in itertools.combinations(sorted(tri), 2):
        X = a | b
        if bin(X).count("1") != 4:
            continue
        if all((X ^ (1 << i)) in tri for i in range(M.size) if (X >> i) & 1):
            lines.add(X)
    out = []
    for X in sorted(lines):
        for T in circuit_masks(M.dual, 3):
            if X & T:
                out.append(Violation("u24-restriction", _name(M), f"{set(M.labels(X))} meets triad {set(M.labels(T))}"))
    return out


def check_shortening_connectivity(M: Matroid, N: Matroid) -> List[Violation]:
    """
    For a fan with at least four elements and a rim e_i, if
    M / e_i \\ e_{i+1} keeps an N-minor then it is 3-connected.
    """
    if not is_3connected(M) or not in_target_class(M, N):
        return []
    out = []
    for F in enumerate_fans(M, 4):
        if F.ambiguous:
            continue
        for G in (F, F.reversed()):
            for i in range(len(G) - 1):
                if G.is_spoke(i):
                    continue
                smaller = minor(M, [G.seq[i]], [G.seq[i + 1]])
                if has_minor(smaller, N) is not None and not is_3connected(smaller):
                    out.append(Violation(
                        "shortening-connectivity", _name(M),
                        f"contracting {G.seq[i]} and deleting {G.seq[i + 1]} from {G}",
                    ))
    return out


def check_four_fan_connectivity(M: Matroid, N: Matroid) -> List[Violation]:
    """If (e1, e2, e3, e4) is a fan with e2 a rim and M / e2 \\ e3 is N, then M is 3-connected."""
    if M.size != N.size + 2 or not in_target_class(M, N) or is_3connected(M):
        return []
    out = []
    for F in enumerate_fans(M, 4):
        if F.ambiguous:
            continue
        for G in (F, F.reversed()):
            for i in range(len(G) - 3):
                if G.is_spoke(i + 1):
                    continue
                if is_isomorphic(minor(M, [G.seq[i + 1]], [G.seq[i + 2]]), N) is not None:
                    out.append(Violation("four-fan-connectivity", _name(M), f"{G} without 3-connectivity"))
    return out


GENERAL_CHECKS: Dict[str, Callable[[Matroid], List[Violation]]] = {
    "fan-separation": check_fan_separation,
    "internal-shortening": check_internal_shortening,
    "external-triangle": check_external_triangles,
    "small-host": check_small_host,
    "external-element": check_external_element,
    "triangle-in-fan": check_triangles_in_fans,
    "separator-in-fan": check_separators_in_fans,
    "fan-overlap": check_fan_overlaps,
}

CLASS_CHECKS: Dict[str, Callable[[Matroid, Matroid], List[Violation]]] = {
    "triangle-triad-independence": check_triangle_triad_independence,
    "u24-restriction": check_u24_restrictions,
    "shortening-connectivity": check_shortening_connectivity,
    "four-fan-connectivity": check_four_fan_connectivity,
}


def run_fan_suite(matroids: Iterable[Matroid], target: Optional[Matroid] = None) -> Dict[str, List[Violation]]:
    """
    Run every checker over the given matroids.

    Class checks run only when a target N is given, and only on matroids
    that sit in the class of N (see `in_target_class`).

    Returns:
        Check name -> violations (empty lists when the property held everywhere)
    """
    report: Dict[str, List[Violation]] = {name: [] for name in GENERAL_CHECKS}
    if target is not None:
        report.update({name: [] for name in CLASS_CHECKS})
    count = 0
    for M in matroids:
        count += 1
        for name, check in GENERAL_CHECKS.items():
            report[name].extend(check(M))
        if target is not None:
            for name, check in CLASS_CHECKS.items():
                report[name].extend(check(M, target))
    bad = sum(len(v) for v in report.values())
    if bad:
        logger.warning(f"Fan suite found {bad} violations over {count} matroids")
    else:
        logger.info(f"Fan suite passed on {count} matroids")
    return report
