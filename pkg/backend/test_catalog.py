"""
Tests for the named-matroid catalog.
"""

import sys
from pathlib import Path

import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from backend.catalog import Catalog
from services.exceptions import InputError
from services.fields_repr import ReprMatroid
from services.formats import as_matroid, dump_mtx, parse_mtx
from services.fragility import MinorSet
from services.matroid_core import has_minor, is_3connected, is_isomorphic, triangles
from services.wheels import wheel


@pytest.fixture(scope="module")
def catalog():
    return Catalog()


@pytest.mark.parametrize(
    "name, size, rank, bases",
    [
        ("U24", 4, 2, 6),
        ("U25", 5, 2, 10),
        ("U35", 5, 3, 10),
        ("U26", 6, 2, 15),
        ("U36", 6, 3, 20),
        ("U46", 6, 4, 15),
        ("P6", 6, 3, 19),
        ("F7", 7, 3, 28),
        ("F7dual", 7, 4, 28),
        ("MK4", 6, 3, 16),
    ],
)
def test_fixed_entries(catalog, name, size, rank, bases):
    M = catalog.matroid(name)
    assert (M.size, M.rank, M.num_bases) == (size, rank, bases)


def test_p6_has_one_triangle(catalog):
    assert len(list(triangles(catalog.matroid("P6")))) == 1


def test_whirl3(catalog):
    M = catalog.matroid("whirl3")
    assert (M.size, M.rank) == (6, 3)
    assert has_minor(M, catalog.matroid("U24")) is not None
    assert not catalog.entry("whirl3").binary


def test_mk4_is_wheel3(catalog):
    assert is_isomorphic(catalog.matroid("MK4"), wheel(3).matroid) is not None


def test_n12(catalog):
    N = catalog.get("N12")
    assert isinstance(N, ReprMatroid)
    assert (N.matroid.size, N.rank, N.p) == (12, 6, 2)
    assert is_3connected(N.matroid)
    family = catalog.fans("N12")
    assert len(family) == 3
    assert all(len(F) == 4 for F in family)


def test_construction_is_deterministic(catalog):
    for entry in catalog.entries():
        assert as_matroid(entry.build()) == as_matroid(entry.build())


def test_entries_read_back_from_mtx(catalog):
    for name in catalog.names() + ["wheel4", "whirl4"]:
        M = catalog.get(name)
        assert as_matroid(parse_mtx(dump_mtx(M, name=name))) == as_matroid(M)


def test_unknown_names(catalog):
    with pytest.raises(InputError, match="Unknown catalog matroid"):
        catalog.get("F8")
    with pytest.raises(InputError):
        catalog.get("wheel1")
    with pytest.raises(InputError):
        Catalog(max_elements=10).get("wheel6")
    assert not catalog.has("F8")
    assert catalog.has("whirl5")


def test_recorded_fans(catalog):
    assert catalog.fans("F7").sequences == [("a", "b", "d")]
    assert catalog.fans("U24") is None


def test_listing(catalog):
    lines = catalog.listing(["F7", "N12"])
    assert lines[0].startswith("F7: 7 elements, rank 3, repr-matrix;")
    assert lines[1].startswith("N12: 12 elements, rank 6, glue-blueprint;")


def test_minor_set(catalog):
    S = catalog.minor_set(["F7", "F7dual", ""])
    assert len(S) == 2
    assert S.closed_under_duality()
    assert len(catalog.minor_set([])) == 0


def test_task(catalog):
    F7 = catalog.get("F7")
    task = catalog.task(F7, MinorSet(), 2, 1, N_ref="F7")
    assert task.fans.sequences == [("a", "b", "d")]
    explicit = catalog.task(F7, MinorSet(), 2, 1, fans=[("a", "c", "e")])
    assert explicit.fans.sequences == [("a", "c", "e")]
    with pytest.raises(InputError, match="not GF\\(3\\)"):
        catalog.task(F7, MinorSet(), 3, 1, N_ref="F7")
    with pytest.raises(InputError, match="matrix representation"):
        catalog.task(catalog.get("whirl3"), MinorSet(), 2, 1)
    with pytest.raises(InputError, match="No fan family"):
        catalog.task(catalog.get("U24"), MinorSet(), 3, 1, N_ref="U24")


def test_resolve_reads_mtx_files(catalog, tmp_path):
    path = tmp_path / "fano.mtx"
    path.write_text(dump_mtx(catalog.get("F7")))
    assert as_matroid(catalog.resolve(str(path))) == catalog.matroid("F7")
