"""
File Formats for fanforge
Text formats for matroids (.mtx), grafts (.graft), fan families (.fans)
and blueprints (.bp). Tokens are whitespace separated; '#' starts a comment.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Tuple, Union

import networkx as nx
import numpy as np

from .exceptions import InputError
from .fields_repr import GF, Graft, ReprMatroid
from .matroid_core import Matroid, from_bases
from .wheel_glue import Blueprint

logger = logging.getLogger(__name__)

MatroidLike = Union[Matroid, ReprMatroid]


def _lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield number, tokens


def _int(token: str, number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputError(f"line {number}: {what} must be an integer, got '{token}'")


# ---------------------------------------------------------------------------
# .mtx
# ---------------------------------------------------------------------------

def parse_mtx(text: str) -> MatroidLike:
    """
    Parse a matroid file: either basis lines or a repr block.

    Returns:
        ReprMatroid when the file has a repr block, else Matroid

    Raises:
        InputError: On malformed or inconsistent content
    """
    name, elements, rank = "", None, None
    bases: List[Tuple[str, ...]] = []
    p, rows = None, None
    columns = {}
    for number, tokens in _lines(text):
        key, rest = tokens[0], tokens[1:]
        if key == "matroid":
            name = " ".join(rest)
        elif key == "elements":
            elements = tuple(rest)
        elif key == "rank":
            rank = _int(rest[0] if rest else "", number, "rank")
        elif key == "basis":
            bases.append(tuple(rest))
        elif key == "repr":
            if len(rest) != 3 or not rest[0].startswith("GF(") or not rest[0].endswith(")") or rest[1] != "rows":
                raise InputError(f"line {number}: expected 'repr GF(<p>) rows <r>'")
            p = _int(rest[0][3:-1], number, "field size")
            rows = _int(rest[2], number, "row count")
        elif key == "col":
            if p is None:
                raise InputError(f"line {number}: 'col' before 'repr'")
            if not rest:
                raise InputError(f"line {number}: 'col' needs a label")
            digits = "".join(rest[1:])
            if len(digits) != rows or any(not d.isdigit() or int(d) >= p for d in digits):
                raise InputError(f"line {number}: column of '{rest[0]}' needs {rows} digits in 0..{p - 1}")
            columns[rest[0]] = [int(d) for d in digits]
        else:
            raise InputError(f"line {number}: unknown keyword '{key}'")

    if elements is None:
        elements = tuple(columns) if columns else None
    if elements is None:
        raise InputError("Matroid file has no 'elements' line")

    if p is not None:
        if set(columns) != set(elements):
            raise InputError("repr block must give one column per element")
        matrix = np.array([columns[e] for e in elements], dtype=np.int64).T.reshape(rows, len(elements))
        R = ReprMatroid(GF(p), elements, matrix, name=name)
        if rank is not None and R.rank != rank:
            raise InputError(f"Declared rank {rank} but the matrix has rank {R.rank}")
        return R

    if not bases:
        raise InputError("Matroid file has neither basis lines nor a repr block")
    M = from_bases(elements, bases, name=name)
    if rank is not None and M.rank != rank:
        raise InputError(f"Declared rank {rank} but bases have size {M.rank}")
    return M


def dump_mtx(M: MatroidLike, name: Optional[str] = None) -> str:
    """Serialize a matroid; represented matroids are written as a repr block."""
    name = name if name is not None else (M.name or "unnamed")
    if isinstance(M, ReprMatroid):
        R = M.reduced()
        lines = [f"matroid {name}", f"elements {' '.join(R.labels)}", f"rank {R.rank}",
                 f"repr GF({R.p}) rows {R.rows}"]
        for j, e in enumerate(R.labels):
            lines.append(f"col {e} {''.join(str(int(d)) for d in R.matrix[:, j])}")
        return "\n".join(lines) + "\n"
    lines = [f"matroid {name}", f"elements {' '.join(M.groundset)}", f"rank {M.rank}"]
    lines += [f"basis {' '.join(M.labels(b))}" for b in sorted(int(b) for b in M.basis_masks)]
    return "\n".join(lines) + "\n"


def as_matroid(M: MatroidLike) -> Matroid:
    return M.matroid if isinstance(M, ReprMatroid) else M


# ---------------------------------------------------------------------------
# .graft
# ---------------------------------------------------------------------------

def parse_graft(text: str) -> Graft:
    """
    Parse `vertices <n>`, `edge <u> <v> <label>` and `gamma <v> ...` lines.
    Vertices are 0..n-1.
    """
    n, gamma, label = None, frozenset(), "g"
    G = nx.MultiGraph()
    for number, tokens in _lines(text):
        key, rest = tokens[0], tokens[1:]
        if key == "vertices":
            n = _int(rest[0] if rest else "", number, "vertex count")
            G.add_nodes_from(range(n))
        elif key == "edge":
            if n is None or len(rest) != 3:
                raise InputError(f"line {number}: expected 'edge <u> <v> <label>' after 'vertices'")
            u, v = (_int(t, number, "vertex") for t in rest[:2])
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"line {number}: vertex out of range 0..{n - 1}")
            G.add_edge(u, v, label=rest[2])
        elif key == "gamma":
            gamma = frozenset(_int(t, number, "vertex") for t in rest)
        elif key == "label":
            label = rest[0]
        else:
            raise InputError(f"line {number}: unknown keyword '{key}'")
    if n is None:
        raise InputError("Graft file has no 'vertices' line")
    return Graft(G, gamma, label)


def dump_graft(g: Graft) -> str:
    index = {v: i for i, v in enumerate(g.graph.nodes)}
    lines = [f"vertices {len(index)}"]
    lines += [f"edge {index[u]} {index[v]} {label}" for u, v, label in g.graph.edges(data="label")]
    lines.append("gamma " + " ".join(str(index[v]) for v in sorted(g.gamma, key=index.get)))
    if g.label != "g":
        lines.append(f"label {g.label}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# .fans
# ---------------------------------------------------------------------------

@dataclass
class FansFile:
    target: Optional[str] = None
    fans: List[Tuple[str, ...]] = field(default_factory=list)


def parse_fans(text: str) -> FansFile:
    result = FansFile()
    for number, tokens in _lines(text):
        key, rest = tokens[0], tokens[1:]
        if key == "target":
            result.target = " ".join(rest)
        elif key == "fan":
            if len(rest) < 3:
                raise InputError(f"line {number}: a fan needs at least three elements")
            result.fans.append(tuple(rest))
        else:
            raise InputError(f"line {number}: unknown keyword '{key}'")
    return result


def dump_fans(fans, target: Optional[str] = None) -> str:
    lines = [f"target {target}"] if target else []
    lines += ["fan " + " ".join(F.seq if hasattr(F, "seq") else F) for F in fans]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# .bp
# ---------------------------------------------------------------------------

def read_matroid_file(path: Union[str, Path]) -> MatroidLike:
    path = Path(path)
    if not path.exists():
        raise InputError(f"File not found: {path}")
    return parse_mtx(path.read_text())


def parse_bp(text: str, resolve: Optional[Callable[[str], MatroidLike]] = None,
             base_dir: Union[str, Path] = ".") -> Blueprint:
    """
    Parse a blueprint. The core reference is passed to `resolve`, which
    defaults to reading a .mtx file relative to base_dir.

    Raises:
        InputError: If the core has no representation or indices are inconsistent
    """
    if resolve is None:
        resolve = lambda ref: read_matroid_file(Path(base_dir) / ref)
    base, triangles, ranks, deleted = None, {}, {}, set()
    for number, tokens in _lines(text):
        key, rest = tokens[0], tokens[1:]
        if key == "core":
            if len(rest) != 1:
                raise InputError(f"line {number}: expected 'core <matroid-file>'")
            base = resolve(rest[0])
        elif key == "triangle":
            if len(rest) != 4:
                raise InputError(f"line {number}: expected 'triangle <i> <a> <b> <c>'")
            triangles[_int(rest[0], number, "triangle index")] = tuple(rest[1:])
        elif key == "rank":
            if len(rest) != 2:
                raise InputError(f"line {number}: expected 'rank <i> <r>'")
            ranks[_int(rest[0], number, "triangle index")] = _int(rest[1], number, "rank")
        elif key == "delete":
            deleted |= set(rest)
        else:
            raise InputError(f"line {number}: unknown keyword '{key}'")
    if base is None:
        raise InputError("Blueprint has no 'core' line")
    if not isinstance(base, ReprMatroid):
        raise InputError("Blueprint core must carry a repr block")
    if set(triangles) != set(ranks):
        raise InputError("Every triangle index needs exactly one rank line")
    order = sorted(triangles)
    return Blueprint(base, tuple(triangles[i] for i in order), tuple(ranks[i] for i in order), frozenset(deleted))


def dump_bp(bp: Blueprint, core_ref: str) -> str:
    lines = [f"core {core_ref}"]
    for i, ((a, b, c), r) in enumerate(zip(bp.triangles, bp.ranks), start=1):
        lines += [f"triangle {i} {a} {b} {c}", f"rank {i} {r}"]
    if bp.delete:
        lines.append("delete " + " ".join(sorted(bp.delete)))
    return "\n".join(lines) + "\n"
