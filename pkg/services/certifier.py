"""
Certifier Service for fanforge
Enumerates every 3-connected class member with N as a minor and at most
`depth` extra elements, and checks each is a fan-extension of N. A clean
run certifies the whole class; otherwise the first failure is returned as
a counterexample that can be re-verified from scratch.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .exceptions import HypothesisError, InputError, ResourceAbort
from .fans import (
    FanExtensionService,
    FanFamily,
    check_target,
    fan_contains_two_members,
    has_covering_family,
    literal_embedding,
)
from .fields_repr import ReprMatroid, extensions, fresh_label
from .formats import dump_mtx, parse_mtx
from .fragility import ClassPredicate, FragilityService, HypothesisReport, MinorSet
from .matroid_core import (
    IsoIndex,
    Matroid,
    MinorWitness,
    apply_witness,
    has_minor,
    is_3connected,
    minor_witnesses,
    relabel,
)

logger = logging.getLogger(__name__)

CERTIFIED = "certified"
COUNTEREXAMPLE = "counterexample"


@dataclass
class CertTask:
    """What to certify: a target, its fan family, the class and the depth."""

    N: ReprMatroid
    fans: FanFamily
    class_pred: ClassPredicate
    depth: int = 2
    hypotheses: Optional[HypothesisReport] = None
    sample_hypotheses: bool = False
    fast_path: bool = True


@dataclass
class Candidate:
    repr: ReprMatroid
    level: int
    extended: Tuple[str, ...] = ()
    coextended: Tuple[str, ...] = ()
    steps: Tuple[str, ...] = ()
    parent: Optional["Candidate"] = field(default=None, repr=False, compare=False)

    @property
    def matroid(self) -> Matroid:
        return self.repr.matroid

    def minor_witness(self, N: Matroid) -> MinorWitness:
        return MinorWitness(frozenset(self.coextended), frozenset(self.extended),
                            tuple((e, e) for e in N.groundset))


@dataclass
class CertWitness:
    repr: ReprMatroid
    minor: Optional[MinorWitness] = None
    trace: List[str] = field(default_factory=list)
    steps: Tuple[str, ...] = ()

    def relabeled(self, mapping: Dict[str, str]) -> "CertWitness":
        """The same witness with M's elements renamed."""
        minor = None
        if self.minor is not None:
            minor = MinorWitness(
                frozenset(mapping.get(e, e) for e in self.minor.contract),
                frozenset(mapping.get(e, e) for e in self.minor.delete),
                tuple((n, mapping.get(m, m)) for n, m in self.minor.embedding),
            )
        return CertWitness(self.repr.relabel(mapping), minor, list(self.trace), self.steps)


@dataclass
class CertResult:
    verdict: str
    field: int
    depth: int
    counts: List[int]
    examined: int = 0
    witness: Optional[CertWitness] = None
    target: str = ""
    fans: List[Tuple[str, ...]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def relative(self) -> bool:
        """Verdicts over fields other than GF(2) hold only for the given representation."""
        return self.field != 2

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict == CERTIFIED else 1

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}", f"target: {self.target}", f"field: GF({self.field})",
                 f"depth: {self.depth}"]
        lines += [f"level {k}: {c} candidates" for k, c in enumerate(self.counts)]
        lines.append(f"class members examined: {self.examined}")
        if self.relative:
            lines.append("note: relative to the given representation")
        lines += [f"note: {n}" for n in self.notes]
        if self.witness is not None:
            lines.append("witness:")
            lines += ["  " + line for line in dump_mtx(self.witness.repr, name="witness").splitlines()]
            if self.witness.steps:
                lines.append("built by: " + "; ".join(self.witness.steps))
            lines += self.witness.trace
        return "\n".join(lines) + "\n"

    def to_machine(self) -> dict:
        data = {
            "verdict": self.verdict,
            "field": self.field,
            "depth": self.depth,
            "counts": list(self.counts),
            "examined": self.examined,
            "relative": self.relative,
            "target": self.target,
            "fans": [list(F) for F in self.fans],
            "notes": list(self.notes),
            "witness_mtx": None,
            "witness_minor": None,
            "trace": [],
        }
        if self.witness is not None:
            data["witness_mtx"] = dump_mtx(self.witness.repr, name="witness")
            data["trace"] = list(self.witness.trace)
            if self.witness.minor is not None:
                data["witness_minor"] = {
                    "contract": sorted(self.witness.minor.contract),
                    "delete": sorted(self.witness.minor.delete),
                    "embedding": [list(pair) for pair in self.witness.minor.embedding],
                }
        return data

    @classmethod
    def from_machine(cls, data: dict) -> "CertResult":
        """
        Raises:
            InputError: If the result data is missing fields
        """
        try:
            witness = None
            if data.get("witness_mtx"):
                R = parse_mtx(data["witness_mtx"])
                if not isinstance(R, ReprMatroid):
                    raise InputError("Witness must carry a repr block")
                minor = None
                if data.get("witness_minor"):
                    m = data["witness_minor"]
                    minor = MinorWitness(frozenset(m["contract"]), frozenset(m["delete"]),
                                         tuple(tuple(pair) for pair in m["embedding"]))
                witness = CertWitness(R, minor, list(data.get("trace", [])))
            return cls(
                verdict=data["verdict"],
                field=int(data["field"]),
                depth=int(data["depth"]),
                counts=list(data["counts"]),
                examined=int(data.get("examined", 0)),
                witness=witness,
                target=data.get("target", ""),
                fans=[tuple(F) for F in data.get("fans", [])],
                notes=list(data.get("notes", [])),
            )
        except InputError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"Malformed certificate: {str(e)}")


def single_extensions(R: ReprMatroid, label: Optional[str] = None) -> List[ReprMatroid]:
    """Every single-element extension including the loop, zero vector first."""
    label = label or fresh_label(R.labels)
    base = R.reduced()
    loop = base.with_column(label, np.zeros(base.rows, dtype=np.int64))
    return [loop] + extensions(R, label=label)


def single_coextensions(R: ReprMatroid, label: Optional[str] = None) -> List[ReprMatroid]:
    """Every single-element coextension including the coloop."""
    return [E.dual() for E in single_extensions(R.dual(), label=label)]


class CertifierService:
    """
    Bounded-depth certification of the fan-extension theorem's conclusion.
    """

    def __init__(self, cap: int = 50_000, node_cap: int = 200_000, threads: int = 1,
                 fragility: Optional[FragilityService] = None):
        """
        Args:
            cap: Ceiling on enumerated isomorphism classes
            node_cap: Ceiling on recognizer search nodes per candidate
            threads: Worker threads for candidate checks
            fragility: Service used for hypothesis checks
        """
        self.cap = cap
        self.node_cap = node_cap
        self.threads = max(1, threads)
        self.fragility = fragility or FragilityService(threads=1)

    # -- enumeration ---------------------------------------------------------

    def _levels(self, task: CertTask) -> List[List[Candidate]]:
        if task.depth < 0:
            raise InputError(f"Depth must be non-negative, got {task.depth}")
        levels = [[Candidate(task.N, 0)]]
        total = 1
        for level in range(1, task.depth + 1):
            index = IsoIndex()
            current: List[Candidate] = []

            def add(item: Candidate):
                nonlocal total
                _, is_new = index.add(item.matroid, item)
                if is_new:
                    current.append(item)
                    total += 1
                    if total > self.cap:
                        raise ResourceAbort(f"Candidate enumeration exceeded {self.cap} isomorphism classes")

            for parent in levels[-1]:
                if parent.coextended:
                    continue
                for k, R in enumerate(single_extensions(parent.repr)):
                    e = R.labels[-1]
                    add(Candidate(R, level, parent.extended + (e,), parent.coextended,
                                  parent.steps + (f"extend {e} #{k}",), parent))
            for parent in levels[-1]:
                for k, R in enumerate(single_coextensions(parent.repr)):
                    e = R.labels[-1]
                    add(Candidate(R, level, parent.extended, parent.coextended + (e,),
                                  parent.steps + (f"coextend {e} #{k}",), parent))
            levels.append(current)
            logger.info(f"Level {level}: {len(current)} isomorphism classes")
        return levels

    def _keep(self, item: Candidate, N: Matroid) -> bool:
        M = item.matroid
        if not is_3connected(M):
            return False
        if apply_witness(M, item.minor_witness(N)) == N:
            return True
        return has_minor(M, N) is not None

    def enumerate_candidates(self, task: CertTask) -> List[Candidate]:
        """
        All isomorphism classes reachable from N by at most `depth`
        extensions followed by coextensions, kept when 3-connected with an
        N-minor. Extensions come before coextensions and vectors follow
        lexicographic digit order.

        Raises:
            InputError: On a negative depth
            ResourceAbort: If the enumeration exceeds the cap
        """
        N = task.N.matroid
        return [item for level in self._levels(task) for item in level if self._keep(item, N)]

    # -- certification -------------------------------------------------------

    def _failure_trace(self, M: Matroid, N: Matroid, fans: FanFamily) -> List[str]:
        for w in minor_witnesses(M, N):
            M_lit, _ = literal_embedding(M, N, w)
            if has_covering_family(M_lit, N, fans):
                return ["recognizer: covering family exists but no shortening sequence reaches N"]
        return ["recognizer: no covering family under any minor witness"]

    def _in_class(self, item: Candidate, pred: ClassPredicate) -> bool:
        """
        Fragility passes to minors and a parent is a minor of its children,
        so a parent outside the class rules its children out.
        """
        if pred.S and item.parent is not None and not self._in_class(item.parent, pred):
            return False
        return item.matroid in pred

    def _check(self, item: Candidate, task: CertTask, pred: ClassPredicate, use_shortcut: bool) -> Optional[bool]:
        """None when outside the class, else whether the candidate is a fan-extension."""
        M = item.matroid
        if not self._in_class(item, pred):
            return None
        N = task.N.matroid
        recognizer = FanExtensionService(node_cap=self.node_cap)
        if use_shortcut and recognizer.covering_family_shortcut(M, N, task.fans, class_guarantee=True):
            return True
        return recognizer.is_fan_extension(M, N, task.fans).decision

    def sample_non3connected(self, task: CertTask, levels: Optional[List[List[Candidate]]] = None) -> HypothesisReport:
        """
        Spot-check that enumerated class members which are not 3-connected
        are 3-connected up to series and parallel sets.
        """
        levels = levels if levels is not None else self._levels(task)
        N = task.N.matroid
        pool = [item.matroid for level in levels[1:] for item in level if not is_3connected(item.matroid)]
        return self.fragility.check_hypotheses(N, task.class_pred.S, sample_class=pool)

    def certify(self, task: CertTask) -> CertResult:
        """
        Check every candidate; certified iff each class member is a fan-extension.

        Raises:
            HypothesisError: If the theorem's hypotheses fail, with the report attached
            ResourceAbort: If a cap is breached
        """
        N = task.N.matroid
        S = task.class_pred.S
        report = task.hypotheses or self.fragility.check_hypotheses(N, S)
        report.raise_for_problems()
        check_target(N, task.fans)

        started = time.monotonic()
        levels = self._levels(task)
        logger.info(f"Enumeration took {time.monotonic() - started:.1f}s")
        notes: List[str] = []
        if task.sample_hypotheses:
            sampled = self.sample_non3connected(task, levels)
            sampled.raise_for_problems()
            notes.append(f"{sampled.sampled} non-3-connected members sampled")

        candidates = [item for level in levels for item in level if self._keep(item, N)]
        counts = [sum(1 for item in candidates if item.level == k) for k in range(task.depth + 1)]
        use_shortcut = task.fast_path and bool(S) and not fan_contains_two_members(N, task.fans)
        pred = task.class_pred
        if S and pred.service.has_S_minor(N, S):
            pred = replace(pred, hints=(N,))

        started = time.monotonic()
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                verdicts = list(pool.map(lambda item: self._check(item, task, pred, use_shortcut), candidates))
        else:
            verdicts = [self._check(item, task, pred, use_shortcut) for item in candidates]
        logger.info(f"Checked {len(candidates)} candidates in {time.monotonic() - started:.1f}s")

        result = CertResult(
            verdict=CERTIFIED,
            field=task.N.p,
            depth=task.depth,
            counts=counts,
            examined=sum(1 for v in verdicts if v is not None),
            target=task.N.name,
            fans=task.fans.sequences,
            notes=notes,
        )
        for item, verdict in zip(candidates, verdicts):
            if verdict is False:
                M = item.matroid
                result.verdict = COUNTEREXAMPLE
                result.witness = CertWitness(item.repr, item.minor_witness(N),
                                             self._failure_trace(M, N, task.fans), item.steps)
                logger.info(f"Counterexample at level {item.level}: {len(M.groundset)} elements, rank {M.rank}")
                break
        else:
            logger.info(f"Certified {task.N.name or 'N'} at depth {task.depth}: {result.examined} class members")
        if result.relative:
            logger.warning(f"Verdict over GF({result.field}) is relative to the given representation")
        return result

    def verify_witness(self, result: CertResult, task: CertTask) -> bool:
        """
        Re-check a counterexample from scratch with fresh, cache-free objects:
        in the class, 3-connected, has N as a minor, not a fan-extension.
        """
        if result.witness is None:
            return False
        w = result.witness
        try:
            M = Matroid(w.repr.matroid.groundset, w.repr.matroid.basis_masks)
            N_old = task.N.matroid
            N = Matroid(N_old.groundset, N_old.basis_masks, name=N_old.name)
            fans = FanFamily.from_sequences(N, task.fans.sequences)
            S = MinorSet(tuple(Matroid(X.groundset, X.basis_masks, name=X.name) for X in task.class_pred.S))
            pred = ClassPredicate(task.class_pred.field, S, FragilityService())
            if M not in pred or not is_3connected(M):
                return False
            if w.minor is not None:
                if apply_witness(M, w.minor) != relabel(N, w.minor.mapping):
                    return False
            elif has_minor(M, N) is None:
                return False
            return not FanExtensionService(node_cap=self.node_cap).is_fan_extension(M, N, fans).decision
        except (InputError, HypothesisError) as e:
            logger.info(f"Witness failed verification: {str(e)}")
            return False
