import numpy as np
import pytest

from diclique import BipartiteDigraph, Digraph


@pytest.fixture
def make_digraph():
    def build(n, edges):
        return Digraph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))

    return build


@pytest.fixture
def make_bipartite():
    def build(n, m, demand, supply):
        return BipartiteDigraph.from_edges(
            n, m,
            np.array(demand, dtype=np.int64).reshape(-1, 2),
            np.array(supply, dtype=np.int64).reshape(-1, 2),
        )

    return build
