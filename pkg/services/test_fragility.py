"""
Tests for S-minors, S-fragility and the theorem hypothesis checks.
"""

import itertools
import re
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.conftest import fano_repr, u24_repr
from services.exceptions import HypothesisError
from services.fields_repr import GF, ReprMatroid, projective_points
from services.fragility import (
    ClassPredicate,
    FragilityService,
    MinorSet,
    check_hypotheses,
    has_S_minor,
    is_S_fragile,
)
from services.matroid_core import minor, uniform_matroid
from services.wheel_glue import Blueprint, glue_wheels
from services.wheels import wheel, whirl

F7 = fano_repr().matroid
F7_DUAL = F7.dual
FANO_PAIR = MinorSet.of(F7, F7_DUAL)
U24 = u24_repr().matroid
U24_ONLY = MinorSet.of(U24)


def ag32():
    columns = [(1,) + bits for bits in itertools.product((0, 1), repeat=3)]
    return ReprMatroid(2, "stuvwxyz", np.array(columns).T, name="AG(3,2)").matroid


def binary_matroids(rows, cols):
    points = list(projective_points(rows, 2))
    return st.lists(st.integers(0, len(points) - 1), min_size=cols, max_size=cols, unique=True).map(
        lambda picks: ReprMatroid(2, [f"e{i}" for i in range(cols)], np.array([points[k] for k in picks]).T).matroid
    )


def test_has_S_minor_examples():
    assert has_S_minor(F7, FANO_PAIR)
    assert not has_S_minor(wheel(3).matroid, U24_ONLY)
    assert has_S_minor(whirl(3), U24_ONLY)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_whirls_are_u24_fragile(r):
    M = whirl(r) if r > 2 else U24
    assert is_S_fragile(M, U24_ONLY).fragile


def test_small_members_are_fragile_by_size():
    assert is_S_fragile(F7, FANO_PAIR).fragile
    assert is_S_fragile(uniform_matroid(2, 5), MinorSet.of(uniform_matroid(2, 5), uniform_matroid(3, 5))).fragile


def test_affine_cube_is_not_fano_fragile():
    report = is_S_fragile(ag32(), FANO_PAIR)
    assert not report.fragile
    assert all(v.keeps_both for v in report.verdicts)


def test_report_format():
    report = is_S_fragile(whirl(3), U24_ONLY)
    lines = report.lines()
    assert len(lines) == 7
    for line in lines[:-1]:
        assert re.fullmatch(r"\S+: del=(keeps|loses) con=(keeps|loses)", line)
    assert lines[-1] == "fragile: yes"
    assert is_S_fragile(ag32(), FANO_PAIR).lines()[-1] == "fragile: no"


def test_threaded_verdicts_match_sequential():
    M = ag32()
    assert FragilityService(threads=4).is_S_fragile(M, FANO_PAIR).verdicts == is_S_fragile(M, FANO_PAIR).verdicts


@settings(max_examples=20, deadline=None)
@given(binary_matroids(4, 8))
def test_fano_fragility_is_self_dual(M):
    assert is_S_fragile(M, FANO_PAIR).fragile == is_S_fragile(M.dual, FANO_PAIR).fragile


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_minors_of_fragile_matroids_are_fragile(data):
    M = whirl(4)
    removed = data.draw(st.lists(st.sampled_from(M.groundset), unique=True, max_size=4))
    split = data.draw(st.integers(0, len(removed)))
    P = minor(M, removed[:split], removed[split:])
    assert is_S_fragile(P, U24_ONLY).fragile


def test_minor_set_duality_and_shape():
    assert FANO_PAIR.closed_under_duality()
    assert not MinorSet.of(F7).closed_under_duality()
    assert FANO_PAIR.hypothesis_problems() == []
    assert MinorSet.of(U24).hypothesis_problems() == ["U2,4 is a wheel or a whirl"]


def test_hypotheses_reject_wheels_and_whirls():
    report = check_hypotheses(wheel(3).matroid)
    assert not report.ok
    assert "wheel" in report.problems[0]
    report = check_hypotheses(U24)
    assert "whirl" in report.problems[0]


def test_hypotheses_accept_fano():
    report = check_hypotheses(F7, FANO_PAIR, sample_class=[whirl(3), F7.dual, ag32()])
    assert report.ok
    assert report.sampled == 3
    assert report.lines() == ["hypotheses: pass (3 class members sampled)"]


def test_hypotheses_require_target_in_class():
    report = check_hypotheses(ag32(), FANO_PAIR)
    assert any("not fragile" in p for p in report.problems)
    with pytest.raises(HypothesisError) as info:
        report.raise_for_problems()
    assert info.value.report is report


def test_class_predicate():
    fragile = ClassPredicate(GF(2), FANO_PAIR)
    assert F7 in fragile
    assert ag32() not in fragile
    everything = ClassPredicate(GF(2))
    assert ag32() in everything
    assert "fragile" in fragile.describe()


@settings(max_examples=25, deadline=None)
@given(binary_matroids(4, 8))
def test_early_exit_fragility_matches_full_report(M):
    expected = is_S_fragile(M, FANO_PAIR).fragile
    assert FragilityService().is_fragile(M, FANO_PAIR) == expected
    # AG(3,2) / e is a Fano plane
    assert FragilityService().is_fragile(M, FANO_PAIR, hints=(ag32(),)) == expected


def test_hinted_minor_search_matches_direct_search():
    hinted = FragilityService()
    for M in (ag32(), ag32().dual, wheel(4).matroid, F7):
        assert hinted.has_S_minor(M, FANO_PAIR, hints=(ag32(),)) == FragilityService().has_S_minor(M, FANO_PAIR)


def test_cached_answers_follow_the_basis_family():
    service = FragilityService()
    wheel4, whirl4 = wheel(4).matroid, whirl(4)
    assert wheel4.groundset == whirl4.groundset
    assert not service.has_S_minor(wheel4, U24_ONLY)
    assert service.has_S_minor(whirl4, U24_ONLY)
    assert service.is_fragile(whirl4, U24_ONLY)
    assert service.has_S_minor(minor(whirl4, ["x1"], []), U24_ONLY) == has_S_minor(minor(whirl4, ["x1"], []), U24_ONLY)


def test_cache_limit_clears_old_answers():
    service = FragilityService(cache_limit=2)
    for M in (F7, F7_DUAL, ag32(), ag32().dual):
        service.has_S_minor(M, FANO_PAIR)
    assert len(service._minor_cache) <= 2
    assert service.has_S_minor(F7, FANO_PAIR)


def test_class_predicate_uses_hints():
    plain = ClassPredicate(GF(2), FANO_PAIR)
    hinted = ClassPredicate(GF(2), FANO_PAIR, FragilityService(), hints=(ag32(),))
    for M in (F7, F7_DUAL, ag32(), whirl(3)):
        assert (M in hinted) == (M in plain)


@pytest.mark.slow
def test_hypotheses_accept_n12():
    bp = Blueprint(fano_repr(), (("b", "a", "d"), ("c", "a", "e"), ("f", "a", "g")), (3, 3, 3), frozenset("adeg"))
    N12 = glue_wheels(bp, name="N12").matroid
    assert check_hypotheses(N12, FANO_PAIR).ok
