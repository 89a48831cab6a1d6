"""
Tests for the .mtx, .graft, .fans and .bp text formats.
"""

import sys
from pathlib import Path

import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.conftest import fano_repr, k4_graph, u24_repr
from services.exceptions import InputError
from services.fields_repr import Graft, ReprMatroid
from services.formats import (
    as_matroid,
    dump_bp,
    dump_fans,
    dump_graft,
    dump_mtx,
    parse_bp,
    parse_fans,
    parse_graft,
    parse_mtx,
    read_matroid_file,
)
from services.matroid_core import Matroid, uniform_matroid
from services.wheel_glue import Blueprint

FANO_TEXT = """\
# the Fano plane
matroid F7
elements a b c d e f g
rank 3
repr GF(2) rows 3
col a 100
col b 010
col c 001
col d 110
col e 101
col f 011
col g 111
"""


def test_parse_repr_block():
    R = parse_mtx(FANO_TEXT)
    assert isinstance(R, ReprMatroid)
    assert R.name == "F7"
    assert R.p == 2
    assert R.matroid == fano_repr().matroid


def test_columns_may_be_spaced():
    text = FANO_TEXT.replace("col g 111", "col g 1 1 1")
    assert parse_mtx(text).matroid == fano_repr().matroid


def test_dump_repr_reads_back():
    R = u24_repr()
    text = dump_mtx(R)
    assert text.splitlines()[:4] == ["matroid U2,4", "elements a b c d", "rank 2", "repr GF(3) rows 2"]
    back = parse_mtx(text)
    assert back.p == 3
    assert back.matroid == R.matroid


def test_basis_form():
    U = uniform_matroid(2, 4)
    text = dump_mtx(U, name="U24")
    assert sum(1 for line in text.splitlines() if line.startswith("basis ")) == 6
    back = parse_mtx(text)
    assert isinstance(back, Matroid)
    assert back == U
    assert as_matroid(back) is back
    assert as_matroid(u24_repr()) == u24_repr().matroid


@pytest.mark.parametrize(
    "text, message",
    [
        ("elements a b\nrank 1\n", "neither basis lines nor a repr block"),
        ("rank 1\nbasis a\n", "no 'elements' line"),
        ("elements a b\nrank one\nbasis a\n", "line 2: rank must be an integer"),
        ("elements a b\nrank 2\nbasis a\n", "Declared rank 2"),
        ("elements a b\nfrobnicate\n", "line 2: unknown keyword 'frobnicate'"),
        ("elements a\ncol a 1\n", "line 2: 'col' before 'repr'"),
        ("elements a b\nrepr GF(2) rows 2\ncol a 12\ncol b 01\n", "line 3: column of 'a'"),
        ("elements a b\nrepr GF(2) rows 1\ncol a 1\n", "one column per element"),
        ("elements a\nrepr GF2 rows 1\n", "line 2: expected 'repr GF(<p>) rows <r>'"),
        ("elements a b\nrank 2\nrepr GF(2) rows 2\ncol a 10\ncol b 10\n", "matrix has rank 1"),
    ],
)
def test_malformed_mtx(text, message):
    with pytest.raises(InputError) as info:
        parse_mtx(text)
    assert message in str(info.value)


def test_graft_reads_back():
    g = Graft(k4_graph(), frozenset({0, 1}), "t")
    text = dump_graft(g)
    assert "gamma 0 1" in text
    assert "label t" in text
    back = parse_graft(text)
    assert back.gamma == frozenset({0, 1})
    assert back.label == "t"
    assert sorted(label for _, _, label in back.graph.edges(data="label")) == list("abcdef")


def test_malformed_graft():
    with pytest.raises(InputError, match="line 2: vertex out of range"):
        parse_graft("vertices 2\nedge 0 5 a\n")
    with pytest.raises(InputError, match="no 'vertices' line"):
        parse_graft("gamma 0\n")
    with pytest.raises(InputError, match="line 1"):
        parse_graft("edge 0 1 a\n")


def test_fans_file():
    parsed = parse_fans("target F7\nfan a b d\n# comment\nfan c e g f\n")
    assert parsed.target == "F7"
    assert parsed.fans == [("a", "b", "d"), ("c", "e", "g", "f")]
    assert dump_fans(parsed.fans, target="F7") == "target F7\nfan a b d\nfan c e g f\n"
    with pytest.raises(InputError, match="at least three"):
        parse_fans("fan a b\n")


BP_TEXT = """\
core fano.mtx
triangle 1 b a d
rank 1 3
triangle 2 c a e
rank 2 3
delete a d
"""


def test_blueprint_with_resolver():
    refs = []

    def resolve(ref):
        refs.append(ref)
        return fano_repr()

    bp = parse_bp(BP_TEXT, resolve=resolve)
    assert refs == ["fano.mtx"]
    assert bp.triangles == (("b", "a", "d"), ("c", "a", "e"))
    assert bp.ranks == (3, 3)
    assert bp.delete == frozenset("ad")
    assert dump_bp(bp, "fano.mtx") == BP_TEXT


def test_blueprint_reads_core_from_disk(tmp_path):
    (tmp_path / "fano.mtx").write_text(FANO_TEXT)
    bp = parse_bp(BP_TEXT, base_dir=tmp_path)
    assert isinstance(bp, Blueprint)
    assert bp.base.matroid == fano_repr().matroid
    assert read_matroid_file(tmp_path / "fano.mtx").name == "F7"


def test_malformed_blueprint(tmp_path):
    with pytest.raises(InputError, match="File not found"):
        parse_bp(BP_TEXT, base_dir=tmp_path)
    with pytest.raises(InputError, match="no 'core' line"):
        parse_bp("triangle 1 a b d\nrank 1 2\n")
    with pytest.raises(InputError, match="exactly one rank line"):
        parse_bp("core x\ntriangle 1 a b d\n", resolve=lambda ref: fano_repr())
    with pytest.raises(InputError, match="repr block"):
        parse_bp("core x\n", resolve=lambda ref: uniform_matroid(2, 4))
