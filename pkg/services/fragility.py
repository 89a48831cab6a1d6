"""
Fragility Service for fanforge
S-minor possession, S-fragility with per-element verdicts, and the
hypothesis checks that must pass before the fan-extension theorem applies.
"""

import hashlib
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exceptions import HypothesisError
from .fields_repr import PrimeField
from .matroid_core import Matroid, contract, delete, has_minor, is_3conn_up_to_sp, is_3connected, is_isomorphic
from .wheels import is_wheel, is_whirl

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinorSet:
    """The set S of excluded-or-required minors defining a fragile class."""

    members: Tuple[Matroid, ...] = ()

    @classmethod
    def of(cls, *members: Matroid) -> "MinorSet":
        return cls(tuple(members))

    @property
    def names(self) -> List[str]:
        return [M.name or f"M{i}" for i, M in enumerate(self.members)]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def hypothesis_problems(self) -> List[str]:
        """Shape constraints on S needed by the fan-extension theorem."""
        problems = []
        for name, M in zip(self.names, self.members):
            if M.size < 4:
                problems.append(f"{name} has fewer than four elements")
            elif not is_3connected(M):
                problems.append(f"{name} is not 3-connected")
            elif is_wheel(M) or is_whirl(M):
                problems.append(f"{name} is a wheel or a whirl")
        return problems

    def closed_under_duality(self) -> bool:
        return all(any(is_isomorphic(M.dual, other) is not None for other in self.members) for M in self.members)


@dataclass(frozen=True)
class ElementVerdict:
    label: str
    deletion_keeps: bool
    contraction_keeps: bool

    @property
    def keeps_both(self) -> bool:
        return self.deletion_keeps and self.contraction_keeps

    def line(self) -> str:
        word = lambda kept: "keeps" if kept else "loses"
        return f"{self.label}: del={word(self.deletion_keeps)} con={word(self.contraction_keeps)}"


@dataclass
class FragilityReport:
    matroid: str
    has_minor: bool
    verdicts: List[ElementVerdict] = field(default_factory=list)

    @property
    def fragile(self) -> bool:
        return not any(v.keeps_both for v in self.verdicts)

    def __bool__(self) -> bool:
        return self.fragile

    def lines(self) -> List[str]:
        return [v.line() for v in self.verdicts] + [f"fragile: {'yes' if self.fragile else 'no'}"]


@dataclass
class HypothesisReport:
    problems: List[str] = field(default_factory=list)
    sampled: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems

    def lines(self) -> List[str]:
        if self.ok:
            return [f"hypotheses: pass ({self.sampled} class members sampled)"]
        return ["hypotheses: fail"] + [f"  {p}" for p in self.problems]

    def raise_for_problems(self):
        """
        Raises:
            HypothesisError: If any hypothesis failed, with this report attached
        """
        if not self.ok:
            raise HypothesisError("; ".join(self.problems), report=self)


class FragilityService:
    """
    Brute-force S-minor and S-fragility checks.

    Per-element verdicts are independent and run on a thread pool when
    threads > 1; the aggregated report keeps ground-set order. S-minor and
    fragility answers are cached across calls, keyed by labels and a digest
    of the basis family.
    """

    def __init__(self, threads: int = 1, cache_limit: int = 100_000):
        self.threads = max(1, threads)
        self.cache_limit = cache_limit
        self._minor_cache: Dict[tuple, bool] = {}
        self._fragile_cache: Dict[tuple, bool] = {}
        self._lock = threading.Lock()

    def _cached(self, cache: dict, M: Matroid, S: MinorSet, compute: Callable[[], bool]) -> bool:
        key = (M.groundset, hashlib.blake2b(M.basis_masks.tobytes(), digest_size=16).digest(), S)
        with self._lock:
            if key in cache:
                return cache[key]
        value = compute()
        with self._lock:
            if len(cache) >= self.cache_limit:
                cache.clear()
            return cache.setdefault(key, value)

    def has_S_minor(self, M: Matroid, S: MinorSet, hints: Sequence[Matroid] = ()) -> bool:
        """
        True iff M has a minor isomorphic to some member of S.

        Args:
            M: The matroid to search
            S: The minor set
            hints: Matroids known to have an S-minor; one of them as a minor
                of M settles the question without searching S directly
        """
        def compute():
            for H in hints:
                if H.size <= M.size and H.rank <= M.rank and has_minor(M, H) is not None:
                    return True
            return any(N.size <= M.size and N.rank <= M.rank and has_minor(M, N) is not None for N in S)

        return self._cached(self._minor_cache, M, S, compute)

    def _verdict(self, M: Matroid, S: MinorSet, e: str) -> ElementVerdict:
        return ElementVerdict(e, self.has_S_minor(delete(M, [e]), S), self.has_S_minor(contract(M, [e]), S))

    def is_S_fragile(self, M: Matroid, S: MinorSet) -> FragilityReport:
        """
        Record for every element whether M \\ e and M / e keep an S-minor.

        M is S-fragile when no element keeps one both ways.
        """
        elements = list(M.groundset)
        if self.threads > 1 and len(elements) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                verdicts = list(pool.map(lambda e: self._verdict(M, S, e), elements))
        else:
            verdicts = [self._verdict(M, S, e) for e in elements]
        report = FragilityReport(M.name or "matroid", self.has_S_minor(M, S), verdicts)
        logger.debug(f"{report.matroid}: fragile={report.fragile}")
        return report

    def is_fragile(self, M: Matroid, S: MinorSet, hints: Sequence[Matroid] = ()) -> bool:
        """
        Same answer as is_S_fragile(M, S).fragile, stopping at the first
        element that keeps an S-minor both ways.
        """
        def keeps_both(e: str) -> bool:
            return (self.has_S_minor(delete(M, [e]), S, hints)
                    and self.has_S_minor(contract(M, [e]), S, hints))

        def compute():
            return not any(keeps_both(e) for e in M.groundset)

        return self._cached(self._fragile_cache, M, S, compute)

    def check_hypotheses(self, N: Matroid, S: Optional[MinorSet] = None,
                         sample_class: Iterable[Matroid] = ()) -> HypothesisReport:
        """
        Check the hypotheses of the fan-extension theorem.

        Args:
            N: The target matroid
            S: The minor set; None or empty for a class without fragility constraint
            sample_class: Class members on which to spot-check that fragile
                matroids with an S-minor are 3-connected up to series and parallel sets

        Returns:
            A report listing every failed hypothesis
        """
        report = HypothesisReport()
        name = N.name or "N"
        if S:
            report.problems.extend(S.hypothesis_problems())
        if N.size < 4:
            report.problems.append(f"{name} has fewer than four elements")
        if not is_3connected(N):
            report.problems.append(f"{name} is not 3-connected")
        if is_wheel(N):
            report.problems.append(f"{name} must be neither a wheel nor a whirl: it is a wheel")
        elif is_whirl(N):
            report.problems.append(f"{name} must be neither a wheel nor a whirl: it is a whirl")
        if S and report.ok:
            if not self.has_S_minor(N, S):
                report.problems.append(f"{name} has no minor in {{{', '.join(S.names)}}}")
            elif not self.is_S_fragile(N, S).fragile:
                report.problems.append(f"{name} is not fragile for {{{', '.join(S.names)}}}")
        for M in sample_class:
            report.sampled += 1
            if S and not (self.has_S_minor(M, S) and self.is_fragile(M, S)):
                continue
            if not is_3conn_up_to_sp(M):
                report.problems.append(f"class member {M.name or report.sampled} is not 3-connected up to series and parallel sets")
        if not report.ok:
            logger.warning(f"Hypothesis check for {name} failed: {report.problems[0]}")
        return report


@dataclass(frozen=True)
class ClassPredicate:
    """
    Membership in the minor-closed class of S-fragile matroids representable
    over a field. Representability holds by construction for candidates.
    """

    field: PrimeField
    S: MinorSet = MinorSet()
    service: FragilityService = field(default_factory=FragilityService, compare=False, repr=False)
    # matroids known to carry an S-minor, tried before S itself
    hints: Tuple[Matroid, ...] = field(default=(), compare=False, repr=False)

    def __contains__(self, M: Matroid) -> bool:
        return not self.S or self.service.is_fragile(M, self.S, self.hints)

    def describe(self) -> str:
        if not self.S:
            return f"all matroids over {self.field}"
        return f"{{{', '.join(self.S.names)}}}-fragile matroids over {self.field}"


def has_S_minor(M: Matroid, S: MinorSet) -> bool:
    return FragilityService().has_S_minor(M, S)


def is_S_fragile(M: Matroid, S: MinorSet) -> FragilityReport:
    return FragilityService().is_S_fragile(M, S)


def check_hypotheses(N: Matroid, S: Optional[MinorSet] = None, sample_class: Iterable[Matroid] = ()) -> HypothesisReport:
    return FragilityService().check_hypotheses(N, S, sample_class)
