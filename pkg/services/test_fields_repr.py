"""
Tests for prime-field linear algebra and represented matroids.
"""

import sys
from pathlib import Path

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.conftest import fano_repr, k4_graph, u24_repr
from services.exceptions import InputError, StructuralError
from services.fields_repr import (
    GF,
    SUPPORTED_PRIMES,
    Graft,
    PrimeField,
    ReprMatroid,
    coextensions,
    extensions,
    graft_matroid,
    graphic_matroid,
    matrix_rank,
    null_space,
    projective_points,
    row_reduce,
    subspace_intersection,
)
from services.matroid_core import (
    IsoIndex,
    contract,
    delete,
    is_isomorphic,
    parallel_classes,
    rank,
    triangles,
    uniform_matroid,
)
from services.wheels import wheel, wheel_graph

REPRS = [fano_repr(), u24_repr(), wheel(3), wheel(3, p=3), fano_repr().dual()]


@pytest.mark.parametrize("p", SUPPORTED_PRIMES)
def test_field_axioms(p):
    assert GF(p).check_axioms()
    for a in range(1, p):
        assert (a * GF(p).inverse(a)) % p == 1


def test_unsupported_field():
    with pytest.raises(InputError):
        PrimeField(4)


def test_row_reduce_and_rank():
    R, pivots = row_reduce(np.array([[2, 1, 0], [1, 2, 0]]), 3)
    assert pivots == [0]
    assert matrix_rank(np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0]]), 2) == 2
    assert matrix_rank(np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0]]), 3) == 3


@pytest.mark.parametrize("p", SUPPORTED_PRIMES)
def test_null_space(p):
    A = np.array([[1, 2, 3, 4], [0, 1, 1, 1]]) % p
    kernel = null_space(A, p)
    assert kernel.shape == (4 - matrix_rank(A, p), 4)
    assert not ((A @ kernel.T) % p).any()


def test_subspace_intersection():
    U = np.array([[1, 0, 0], [0, 1, 0]])
    W = np.array([[0, 1, 0], [0, 0, 1]])
    meet = subspace_intersection(U, W, 3)
    assert meet.tolist() == [[0, 1, 0]]
    assert subspace_intersection(np.array([[1, 0, 0]]), np.array([[0, 0, 1]]), 2).shape[0] == 0


def test_projective_points():
    points = [p.tolist() for p in projective_points(2, 3)]
    assert points == [[0, 1], [1, 0], [1, 1], [1, 2]]
    assert len(list(projective_points(3, 2))) == 7


def test_to_matroid_examples():
    F7 = fano_repr().matroid
    assert F7.rank == 3
    assert F7.num_bases == 28
    assert len(triangles(F7)) == 7
    free = ReprMatroid(5, "abc", np.eye(3, dtype=int)).matroid
    assert free.num_bases == 1
    pair = ReprMatroid(2, "ab", [[1, 1], [0, 0]]).matroid
    assert parallel_classes(pair) == [frozenset("ab")]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(REPRS), st.data())
def test_repr_minors_match_abstract_minors(R, data):
    mask = data.draw(st.integers(0, R.matroid.full))
    X = R.matroid.labels(mask)
    assert R.delete(X).matroid == delete(R.matroid, X)
    assert R.contract(X).matroid == contract(R.matroid, X)


@pytest.mark.parametrize("R", REPRS, ids=lambda R: f"{R.name}-{R.p}")
def test_repr_dual_matches_abstract_dual(R):
    assert R.dual().matroid == R.matroid.dual
    assert R.dual().dual().matroid == R.matroid


def test_graphic_examples(wheel3):
    assert is_isomorphic(graphic_matroid(k4_graph()).matroid, wheel3) is not None
    triangle = nx.MultiGraph()
    triangle.add_edge(0, 1, label="a")
    triangle.add_edge(1, 2, label="b")
    triangle.add_edge(2, 0, label="c")
    assert graphic_matroid(triangle).matroid == uniform_matroid(2, 3)
    assert wheel(4).matroid.size == 8


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=6))
def test_graphic_rank_is_vertices_minus_one(n, extra):
    G = nx.MultiGraph()
    for v in range(1, n):
        G.add_edge(v - 1, v, label=f"p{v}")
    for k, (u, v) in enumerate(extra):
        G.add_edge(u % n, v % n, label=f"q{k}")
    for p in (2, 3):
        assert graphic_matroid(G, p=p).matroid.rank == n - 1


def test_graphic_over_larger_field_matches_binary():
    G = wheel_graph(4)
    assert graphic_matroid(G, p=5).matroid == graphic_matroid(G, p=2).matroid


def test_disconnected_graph_is_structural_error():
    G = nx.MultiGraph()
    G.add_edge(0, 1, label="a")
    G.add_edge(2, 3, label="b")
    with pytest.raises(StructuralError):
        graphic_matroid(G)


def test_graft_examples():
    K4 = k4_graph()
    adjacent = graft_matroid(Graft(K4, frozenset({0, 1})))
    assert adjacent.matroid.size == 7
    assert adjacent.matroid.rank == 3
    # gamma {0, 1} is the incidence vector of edge a
    assert rank(adjacent.matroid, ["a", "g"]) == 1

    empty = graft_matroid(Graft(K4, frozenset()))
    assert rank(empty.matroid, ["g"]) == 0

    path = nx.MultiGraph()
    path.add_edge(0, 1, label="a")
    P2 = graft_matroid(Graft(path, frozenset({0, 1})))
    assert parallel_classes(P2.matroid) == [frozenset({"a", "g"})]

    odd = graft_matroid(Graft(K4, frozenset({0})))
    assert odd.matroid.rank == 4
    assert rank(odd.matroid, list("abcdef")) == 3


def test_graft_deleting_graft_element_gives_graph():
    G = wheel_graph(3)
    g = Graft(G, frozenset({1, 3}))
    assert delete(graft_matroid(g).matroid, ["g"]) == graphic_matroid(G).matroid


def test_invalid_graft():
    with pytest.raises(InputError):
        graft_matroid(Graft(k4_graph(), frozenset({9})))
    with pytest.raises(InputError):
        graft_matroid(Graft(k4_graph(), frozenset({0, 1}), label="a"))


def test_extension_counts():
    R = ReprMatroid(2, "ab", [[1, 0], [0, 1]])
    found = extensions(R)
    assert len(found) == 3
    assert all(e.labels[-1] == "_x1" for e in found)
    # PG(2,2) is full: every extension of F7 is a parallel extension
    for e in extensions(fano_repr()):
        assert len(parallel_classes(e.matroid)) == 7
    assert len(extensions(ReprMatroid(3, "ab", [[1, 0], [0, 1]]))) == 4


def test_extensions_of_mk4_up_to_isomorphism():
    index = IsoIndex()
    for e in extensions(graphic_matroid(k4_graph())):
        assert delete(e.matroid, ["_x1"]) == graphic_matroid(k4_graph()).matroid
        index.add(e.matroid)
    assert len(index) == 2
    assert any(is_isomorphic(M, fano_repr().matroid) for M, _ in index.items())


def test_coextensions():
    U12 = ReprMatroid(2, "ab", [[1, 1]])
    found = coextensions(U12)
    assert len(found) == len(extensions(U12.dual()))
    for co in found:
        assert co.matroid.size == 3 and co.matroid.rank == 2
        assert contract(co.matroid, ["_x1"]) == U12.matroid
    assert found[0].matroid == uniform_matroid(2, 3, labels=["a", "b", "_x1"])


@pytest.mark.parametrize("R", [fano_repr(), wheel(3), u24_repr()], ids=lambda R: R.name)
def test_coextension_then_contraction_round_trip(R):
    for co in coextensions(R):
        assert contract(co.matroid, ["_x1"]) == R.matroid
