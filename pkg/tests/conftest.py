import random

import pytest

from sldforest.core import serialize_canonical
from sldforest.dendrogram import DendrogramState
from sldforest.oracle import kruskal_sld

PATH_EDGES = [(0, 1, 5.0), (1, 2, 1.0), (2, 3, 3.0)]


def oracle_text(st: DendrogramState) -> str:
    return serialize_canonical(kruskal_sld(st.num_vertices, st.edges()), st.forest.weight)


def random_tree_edges(n: int, rng: random.Random, weights=True):
    out = []
    for i in range(1, n):
        j = rng.randrange(i)
        out.append((i, j, rng.randrange(100) / 2) if weights else (i, j))
    return out


@pytest.fixture
def path_state():
    return DendrogramState.build(4, PATH_EDGES)
