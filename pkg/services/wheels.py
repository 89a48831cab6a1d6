"""
Wheels and whirls, and recognizing them up to isomorphism.
"""

from functools import lru_cache
from typing import Optional

import networkx as nx
import numpy as np

from .exceptions import InputError
from .fields_repr import ReprMatroid, graphic_matroid
from .matroid_core import Matroid, is_isomorphic


def wheel_graph(r: int, hub="h") -> nx.MultiGraph:
    """
    Wheel with r spokes. Spoke x_i joins the hub to rim vertex i and rim
    edge y_i joins rim vertices i and i+1 (cyclically).
    """
    if r < 2:
        raise InputError(f"Wheels need rank at least 2, got {r}")
    G = nx.MultiGraph()
    G.add_node(hub)
    G.add_nodes_from(range(1, r + 1))
    for i in range(1, r + 1):
        G.add_edge(hub, i, label=f"x{i}")
        G.add_edge(i, i % r + 1, label=f"y{i}")
    return G


def wheel(r: int, p: int = 2) -> ReprMatroid:
    """M(W_r) with ground set x1, y1, ..., xr, yr."""
    R = graphic_matroid(wheel_graph(r), p=p)
    order = [label for i in range(1, r + 1) for label in (f"x{i}", f"y{i}")]
    return ReprMatroid(R.field, order, R.columns(order), name=f"wheel{r}")


def whirl(r: int) -> Matroid:
    """The wheel with its rim circuit relaxed to a basis."""
    W = wheel(r).matroid
    rim = W.mask([f"y{i}" for i in range(1, r + 1)])
    return Matroid(W.groundset, np.append(W.basis_masks, rim), name=f"whirl{r}", check=False)


@lru_cache(maxsize=32)
def _reference(kind: str, r: int) -> Matroid:
    return wheel(r).matroid if kind == "wheel" else whirl(r)


def _wheel_rank(M: Matroid) -> Optional[int]:
    if M.size % 2 or M.size < 4 or M.rank * 2 != M.size:
        return None
    return M.rank


def is_wheel(M: Matroid) -> bool:
    r = _wheel_rank(M)
    return r is not None and is_isomorphic(M, _reference("wheel", r)) is not None


def is_whirl(M: Matroid) -> bool:
    r = _wheel_rank(M)
    return r is not None and is_isomorphic(M, _reference("whirl", r)) is not None


def is_wheel_or_whirl(M: Matroid) -> bool:
    return M.memo("wheel_or_whirl", lambda: is_wheel(M) or is_whirl(M))
