"""
Shared fixtures for the services tests.
"""

import sys
from pathlib import Path

import networkx as nx
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.fields_repr import ReprMatroid, graphic_matroid
from services.wheels import wheel, whirl

FANO_MATRIX = [
    [1, 0, 0, 1, 1, 0, 1],
    [0, 1, 0, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 1, 1],
]


def fano_repr() -> ReprMatroid:
    return ReprMatroid(2, "abcdefg", FANO_MATRIX, name="F7")


def u24_repr() -> ReprMatroid:
    return ReprMatroid(3, "abcd", [[1, 0, 1, 1], [0, 1, 1, 2]], name="U2,4")


def k4_graph() -> nx.MultiGraph:
    G = nx.MultiGraph()
    labels = iter("abcdef")
    for u in range(4):
        for v in range(u + 1, 4):
            G.add_edge(u, v, label=next(labels))
    return G


@pytest.fixture
def fano():
    return fano_repr().matroid


@pytest.fixture
def u24():
    return u24_repr().matroid


@pytest.fixture
def wheel3():
    return wheel(3).matroid


@pytest.fixture
def whirl3():
    return whirl(3)


@pytest.fixture
def mk4():
    return graphic_matroid(k4_graph(), name="MK4").matroid
