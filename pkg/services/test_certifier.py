"""
Tests for candidate enumeration, certification and witness verification.
"""

import itertools
import json
import sys
import time
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.certifier import (
    CERTIFIED,
    COUNTEREXAMPLE,
    CertifierService,
    CertResult,
    CertTask,
    single_coextensions,
    single_extensions,
)
from services.conftest import fano_repr, u24_repr
from services.exceptions import HypothesisError, InputError, ResourceAbort
from services.fans import FanFamily, forward_fan_extensions
from services.fields_repr import GF, ReprMatroid
from services.fragility import ClassPredicate, MinorSet, is_S_fragile
from services.matroid_core import has_minor, is_3connected, is_isomorphic, minor
from services.wheels import wheel, whirl

F7_REPR = fano_repr()
F7 = F7_REPR.matroid
F7_FANS = FanFamily.from_sequences(F7, [("a", "b", "d")])
FANO_PAIR = MinorSet.of(F7, F7.dual)

# seconds allowed for certifying N12 at depth two on a laptop
N12_DEPTH_TWO_BUDGET = 30 * 60


def ag32():
    columns = [(1,) + bits for bits in itertools.product((0, 1), repeat=3)]
    return ReprMatroid(2, "stuvwxyz", np.array(columns).T, name="AG(3,2)").matroid


def fano_task(depth, fragile=False, **kwargs):
    S = FANO_PAIR if fragile else MinorSet()
    return CertTask(F7_REPR, F7_FANS, ClassPredicate(GF(2), S), depth=depth, **kwargs)


@pytest.fixture(scope="module")
def binary_counterexample():
    task = fano_task(1)
    return task, CertifierService().certify(task)


# -- enumeration -----------------------------------------------------------

def test_single_steps_include_loop_and_coloop():
    ext = single_extensions(F7_REPR)
    assert len(ext) == 8
    assert not ext[0].column("_x1").any()
    coext = single_coextensions(F7_REPR)
    assert len(coext) == 16
    assert all(M.matroid.rank == 4 for M in coext)
    assert coext[0].matroid.dual.rank == 4


def test_depth_zero_is_the_target():
    service = CertifierService()
    candidates = service.enumerate_candidates(fano_task(0))
    assert len(candidates) == 1
    assert candidates[0].matroid == F7


def test_fano_depth_one_candidates():
    candidates = CertifierService().enumerate_candidates(fano_task(1))
    level_one = [c for c in candidates if c.level == 1]
    assert len(level_one) == 2
    assert any(is_isomorphic(c.matroid, ag32()) is not None for c in level_one)
    for c in candidates:
        assert is_3connected(c.matroid)
        assert has_minor(c.matroid, F7) is not None
        assert minor(c.matroid, c.coextended, c.extended) == F7


def test_u24_over_gf3_has_no_three_connected_single_steps():
    U24 = u24_repr()
    task = CertTask(U24, FanFamily(U24.matroid, ()), ClassPredicate(GF(3)), depth=2)
    candidates = CertifierService().enumerate_candidates(task)
    levels = [sum(1 for c in candidates if c.level == k) for k in range(3)]
    assert levels[:2] == [1, 0]
    assert levels[2] > 0
    assert any(is_isomorphic(c.matroid, whirl(3)) is not None for c in candidates)
    for c in candidates:
        assert has_minor(c.matroid, U24.matroid) is not None


def test_negative_depth_is_input_error():
    with pytest.raises(InputError):
        CertifierService().enumerate_candidates(fano_task(-1))


def test_enumeration_cap_aborts():
    with pytest.raises(ResourceAbort):
        CertifierService(cap=2).enumerate_candidates(fano_task(1))


@pytest.mark.slow
def test_forward_extensions_are_enumerated():
    candidates = CertifierService().enumerate_candidates(fano_task(2))
    for item in forward_fan_extensions(F7_REPR, F7_FANS, max_added=2):
        M = item.repr.matroid
        assert any(is_isomorphic(M, c.matroid) is not None for c in candidates)


# -- certification ---------------------------------------------------------

def test_depth_zero_certifies():
    result = CertifierService().certify(fano_task(0, fragile=True))
    assert result.verdict == CERTIFIED
    assert result.counts == [1]
    assert result.exit_code == 0


def test_fragile_class_certifies_at_depth_one():
    service = CertifierService()
    result = service.certify(fano_task(1, fragile=True))
    assert result.verdict == CERTIFIED
    assert result.counts == [1, 2]
    assert result.witness is None
    assert not result.relative


def _fragile_members(candidates):
    return [c for c in candidates if is_S_fragile(c.matroid, FANO_PAIR).fragile]


def test_examined_members_match_full_fragility_reports():
    task = fano_task(1, fragile=True)
    service = CertifierService()
    result = service.certify(task)
    assert result.examined == len(_fragile_members(service.enumerate_candidates(task)))


@pytest.mark.slow
def test_children_of_non_fragile_parents_are_not_fragile():
    task = fano_task(2, fragile=True)
    service = CertifierService()
    candidates = service.enumerate_candidates(task)
    assert all(c.parent is not None for c in candidates if c.level > 0)
    for c in candidates:
        if c.parent is not None and not is_S_fragile(c.parent.matroid, FANO_PAIR).fragile:
            assert not is_S_fragile(c.matroid, FANO_PAIR).fragile
    assert service.certify(task).examined == len(_fragile_members(candidates))


def test_full_recognizer_agrees_with_shortcut():
    fast = CertifierService().certify(fano_task(1, fragile=True))
    slow = CertifierService().certify(fano_task(1, fragile=True, fast_path=False))
    assert fast.verdict == slow.verdict == CERTIFIED
    assert fast.examined == slow.examined


def test_all_binary_matroids_give_counterexample(binary_counterexample):
    _, result = binary_counterexample
    assert result.verdict == COUNTEREXAMPLE
    assert result.exit_code == 1
    assert is_isomorphic(result.witness.repr.matroid, ag32()) is not None
    assert result.witness.trace == ["recognizer: no covering family under any minor witness"]


def test_threads_give_the_same_result(binary_counterexample):
    task, result = binary_counterexample
    threaded = CertifierService(threads=3).certify(task)
    assert threaded.verdict == result.verdict
    assert threaded.witness.repr.matroid == result.witness.repr.matroid


def test_counterexample_verifies(binary_counterexample):
    task, result = binary_counterexample
    assert CertifierService().verify_witness(result, task)


def test_tampered_witness_fails(binary_counterexample):
    task, result = binary_counterexample
    w = result.witness
    dropped = w.repr.labels[-1]
    tampered = CertResult(**{**result.__dict__, "witness": type(w)(w.repr.delete([dropped]), w.minor, w.trace)})
    assert not CertifierService().verify_witness(tampered, task)


def test_relabeled_witness_verifies(binary_counterexample):
    task, result = binary_counterexample
    labels = result.witness.repr.labels
    mapping = {e: f"m{i}" for i, e in enumerate(reversed(labels))}
    moved = CertResult(**{**result.__dict__, "witness": result.witness.relabeled(mapping)})
    assert CertifierService().verify_witness(moved, task)


def test_machine_result_round_trips_and_verifies(binary_counterexample):
    task, result = binary_counterexample
    data = json.loads(json.dumps(result.to_machine()))
    assert data["verdict"] == COUNTEREXAMPLE
    assert data["counts"] == result.counts
    assert data["witness_mtx"].startswith("matroid witness")
    restored = CertResult.from_machine(data)
    assert CertifierService().verify_witness(restored, task)


def test_text_report(binary_counterexample):
    _, result = binary_counterexample
    text = result.to_text()
    assert text.startswith("verdict: counterexample\n")
    assert "level 1: 2 candidates" in text
    assert "repr GF(2) rows 4" in text


def test_malformed_machine_result_is_input_error():
    with pytest.raises(InputError):
        CertResult.from_machine({"verdict": "certified"})


def test_refuses_when_hypotheses_fail():
    W3 = wheel(3)
    task = CertTask(W3, FanFamily(W3.matroid, ()), ClassPredicate(GF(2)), depth=1)
    with pytest.raises(HypothesisError) as info:
        CertifierService().certify(task)
    assert info.value.report is not None


def test_node_cap_aborts_instead_of_answering():
    with pytest.raises(ResourceAbort):
        CertifierService(node_cap=0).certify(fano_task(0))


def test_sampling_flag_records_note():
    result = CertifierService().certify(fano_task(1, fragile=True, sample_hypotheses=True))
    assert result.verdict == CERTIFIED
    assert any("sampled" in note for note in result.notes)


def test_depths_are_monotone():
    service = CertifierService()
    for depth in (0, 1):
        assert service.certify(fano_task(depth, fragile=True)).verdict == CERTIFIED


@pytest.mark.slow
def test_n12_certifies_at_depth_two():
    from services.wheel_glue import Blueprint, glue_wheels

    bp = Blueprint(F7_REPR, (("b", "a", "d"), ("c", "a", "e"), ("f", "a", "g")), (3, 3, 3), frozenset("adeg"))
    glued = glue_wheels(bp, name="N12")
    N12 = glued.repr
    fans = glued.family()
    assert len(fans) == 3
    task = CertTask(N12, fans, ClassPredicate(GF(2), FANO_PAIR), depth=2)
    started = time.monotonic()
    result = CertifierService().certify(task)
    elapsed = time.monotonic() - started
    assert result.verdict == CERTIFIED
    assert result.counts[0] == 1 and result.examined >= 1
    assert elapsed < N12_DEPTH_TWO_BUDGET, f"depth-2 certification took {elapsed:.0f}s"


@pytest.mark.slow
def test_n12_without_fragility_has_verified_counterexample():
    from services.wheel_glue import Blueprint, glue_wheels

    bp = Blueprint(F7_REPR, (("b", "a", "d"), ("c", "a", "e"), ("f", "a", "g")), (3, 3, 3), frozenset("adeg"))
    glued = glue_wheels(bp, name="N12")
    task = CertTask(glued.repr, glued.family(), ClassPredicate(GF(2)), depth=2)
    service = CertifierService()
    result = service.certify(task)
    assert result.verdict == COUNTEREXAMPLE
    assert service.verify_witness(result, task)
