"""
Tests for generalized parallel connection, blueprints and wheel gluing.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.conftest import fano_repr, k4_graph
from services.exceptions import HypothesisError, InputError, StructuralError
from services.fans import FanFamily, forward_fan_extensions, is_fan
from services.fields_repr import ReprMatroid, graphic_matroid, normalize
from services.matroid_core import circuit_masks, is_3connected, is_isomorphic, rank
from services.wheel_glue import (
    Blueprint,
    core,
    decompose,
    fan_plus,
    flats_law_holds,
    glue_wheels,
    gpc,
    gpc_abstract,
    is_fan_extension_by_gluing,
    pi,
    wheel_labels,
)
from services.wheels import is_wheel, wheel

F7_REPR = fano_repr()
F7 = F7_REPR.matroid
F7_FANS = FanFamily.from_sequences(F7, [("a", "b", "d")])
N12_TRIANGLES = (("b", "a", "d"), ("c", "a", "e"), ("f", "a", "g"))


def wheel_on(r, a, b, c, i=1, p=2):
    template = wheel(r, p=p)
    return template.relabel(dict(zip(template.labels, wheel_labels(i, r, a, b, c))))


def n12(triangles=N12_TRIANGLES):
    bp = Blueprint(F7_REPR, triangles, (3, 3, 3), frozenset("adeg"))
    return glue_wheels(bp, name="N12")


@pytest.fixture(scope="module")
def fano_one_step():
    return forward_fan_extensions(F7_REPR, F7_FANS, max_added=1)


# -- pi and gpc ------------------------------------------------------------

def test_pi_measures_common_span():
    assert pi(F7, "ab", "cd") == 1
    assert pi(F7, "ab", "c") == 0
    assert pi(wheel(4).matroid, ["x1", "y1"], ["x2", "x3"]) == 1


def test_pi_rejects_overlap():
    with pytest.raises(InputError):
        pi(F7, "ab", "bc")


def test_wheel_labels_identify_triangle():
    labels = wheel_labels(2, 3, "p", "q", "s")
    assert labels == ("p", "y2_1", "x2_2", "y2_2", "s", "q")
    W = wheel_on(3, "p", "q", "s").matroid
    assert W.mask(["p", "q", "s"]) in circuit_masks(W, 3)


def test_gpc_matches_flats_law_construction():
    W = wheel_on(3, "a", "b", "d")
    P = gpc(F7_REPR, W, verify=True)
    assert P.matroid.size == 10
    assert P.matroid.rank == 3 + 3 - 2
    assert flats_law_holds(P.matroid, F7, W.matroid)
    assert P.matroid == gpc_abstract(F7, W.matroid)


def test_gpc_over_gf3():
    U = ReprMatroid(3, "abcd", [[1, 0, 1, 1], [0, 1, 1, 2]])
    W = wheel_on(3, "a", "c", "b", p=3)
    P = gpc(U, W)
    assert P.matroid.rank == 3
    assert P.matroid == gpc_abstract(U.matroid, W.matroid)


def test_gpc_rejects_mismatched_restrictions():
    free = ReprMatroid(2, ["a", "b", "d", "z"], [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]])
    with pytest.raises(StructuralError):
        gpc(F7_REPR, free)


def test_gpc_rejects_non_modular_attachment():
    # two opposite edges of K4 span a line missing the other opposite pairs
    K4 = graphic_matroid(k4_graph())
    line = ReprMatroid(2, ["a", "f", "z"], np.eye(3, dtype=int))
    with pytest.raises(StructuralError):
        gpc(line, K4)


# -- blueprints ------------------------------------------------------------

def test_blueprint_validation():
    W = wheel(3)
    with pytest.raises(InputError):
        Blueprint(W, (("x1", "y3", "x3"),), (1,), frozenset({"y3"})).validate()
    with pytest.raises(InputError):
        Blueprint(W, (("x1", "y1", "y2"),), (3,), frozenset({"y1"})).validate()
    with pytest.raises(InputError):
        Blueprint(W, (("x1", "y3", "x3"),), (3,), frozenset()).validate()
    with pytest.raises(InputError):
        Blueprint(W, (("x1", "y3", "x3"),), (3,), frozenset({"y3", "y1"})).validate()
    with pytest.raises(InputError):
        Blueprint(W, (("x1", "y3", "x3"),), (3, 4), frozenset({"y3"})).validate()


@pytest.mark.parametrize("r", [2, 3, 4])
def test_gluing_wheel_onto_wheel_triangle_grows_the_wheel(r):
    bp = Blueprint(wheel(3), (("x1", "y3", "x3"),), (r,), frozenset({"y3"}))
    glued = glue_wheels(bp).matroid
    assert glued.rank == r + 1
    assert is_wheel(glued)


def test_empty_blueprint_is_the_base():
    glued = glue_wheels(Blueprint(F7_REPR)).matroid
    assert glued == F7


def test_wheel_label_collision_is_input_error():
    base = F7_REPR.relabel({"g": "x1_2"})
    with pytest.raises(InputError):
        glue_wheels(Blueprint(base, (("a", "b", "d"),), (3,), frozenset({"b"})))


def test_n12():
    result = n12()
    M = result.matroid
    assert M.size == 12
    assert M.rank == 6
    assert is_3connected(M)
    for seq in result.canonical_fans:
        assert len(seq) == 4
        assert is_fan(M, seq) is not None


def test_gluing_order_does_not_matter():
    first = n12().matroid
    second = n12(N12_TRIANGLES[::-1]).matroid
    assert is_isomorphic(first, second) is not None


# -- N+ and the core -------------------------------------------------------

def test_fan_plus_on_spoke_ended_triangle():
    fp = fan_plus(F7_REPR, ("a", "b", "d"))
    assert fp.plus == ("a", "b", "d")
    assert np.array_equal(fp.a, F7_REPR.column("a"))
    assert np.array_equal(fp.b, F7_REPR.column("b"))
    assert np.array_equal(fp.c, F7_REPR.column("d"))


def test_fan_plus_prepends_and_appends_for_rim_ends():
    W = wheel(4)
    fp = fan_plus(W, ("y1", "x2", "y2", "x3", "y3"))
    assert fp.plus == ("_a1", "y1", "x2", "y2", "x3", "y3", "_c1")
    assert len(fp.plus) % 2 == 1
    R = W.reduced()
    assert np.array_equal(fp.a, normalize(R.column("x1"), 2))
    assert np.array_equal(fp.c, normalize(R.column("x4"), 2))
    assert np.array_equal(fp.b, normalize(R.column("y4"), 2))


def test_fan_plus_rejects_non_fan():
    with pytest.raises(InputError):
        fan_plus(F7_REPR, ("a", "b", "c"))


def test_core_of_fano_triangle():
    result = core(F7_REPR, [("a", "b", "d")])
    C = result.core.matroid
    assert set(C.groundset) == {"c", "e", "f", "g", "_a1", "_b1", "_c1"}
    assert is_isomorphic(C, F7) is not None
    assert result.triangles == [("_a1", "_b1", "_c1")]
    assert rank(result.augmented.matroid, result.triangles[0]) == 2
    assert result.parallel_to == {}


def test_core_rejects_overlapping_fans():
    with pytest.raises(InputError):
        core(F7_REPR, [("a", "b", "d"), ("d", "c", "e")])


# -- decomposition ---------------------------------------------------------

def test_target_decomposes_with_rank_two_wheel():
    d = decompose(F7, F7_REPR, F7_FANS)
    assert d.blueprint.ranks == (2,)
    assert d.reglue() == F7


def test_forward_extensions_decompose(fano_one_step):
    for item in fano_one_step:
        M = item.repr.matroid
        d = decompose(M, F7_REPR, F7_FANS)
        assert d.reglue() == M
        assert d.blueprint.ranks == (2 + len(item.trace),)
        assert sum(len(F) for F in d.canonical_fans) >= 3 + len(item.trace)


def test_gluing_recognizes_forward_extensions(fano_one_step):
    for item in fano_one_step:
        assert is_fan_extension_by_gluing(item.repr.matroid, F7_REPR, F7_FANS)


def test_gluing_rejects_matroid_without_covering_family():
    columns = [(1, i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)]
    ag32 = ReprMatroid(2, "stuvwxyz", np.array(columns).T)
    assert not is_fan_extension_by_gluing(ag32.matroid, F7_REPR, F7_FANS)


def test_decompose_checks_hypotheses():
    W3 = wheel(3)
    with pytest.raises(HypothesisError):
        decompose(wheel(4).matroid, W3, FanFamily.from_sequences(W3.matroid, [("x1", "y1", "x2")]))


@pytest.mark.slow
def test_two_step_extensions_decompose():
    for item in forward_fan_extensions(F7_REPR, F7_FANS, max_added=2):
        M = item.repr.matroid
        assert decompose(M, F7_REPR, F7_FANS).reglue() == M


def glued_seed():
    return glue_wheels(Blueprint(F7_REPR, (("b", "a", "d"),), (3,), frozenset("a")), name="F7+W3")


def _check_round_trips(seed, max_added):
    fans = seed.family()
    assert max(len(F) for F in fans.sequences) >= 4
    items = forward_fan_extensions(seed.repr, fans, max_added=max_added)
    assert any(len(item.trace) == max_added for item in items)
    for item in items:
        M = item.repr.matroid
        d = decompose(M, seed.repr, fans)
        assert is_isomorphic(glue_wheels(d.blueprint).matroid, M) is not None
        assert d.reglue() == M


def test_glued_seed_extensions_round_trip():
    _check_round_trips(glued_seed(), 1)


@pytest.mark.slow
def test_glued_seed_two_step_extensions_round_trip():
    _check_round_trips(glued_seed(), 2)
