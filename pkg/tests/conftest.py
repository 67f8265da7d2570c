import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from anchortok.graph import Graph, UNREACHABLE
from anchortok.synthetic import (path_graph, cycle_graph, star_graph,
                                 erdos_renyi, sbm_two_block)


@pytest.fixture
def p5() -> Graph:
    return path_graph(5)


@pytest.fixture
def c5() -> Graph:
    return cycle_graph(5)


@pytest.fixture
def s4() -> Graph:
    return star_graph(4)


@pytest.fixture
def disjoint_pairs() -> Graph:
    """Two disjoint edges {0-1, 2-3}."""
    from anchortok.graph import from_edge_array
    return from_edge_array(np.array([[0, 1], [2, 3]]))


@pytest.fixture
def sbm_fixture():
    return sbm_two_block(60, 0.3, 0.01, seed=5)


def scipy_distances(g: Graph) -> np.ndarray:
    """Independent all-pairs oracle; UNREACHABLE where scipy says inf."""
    data = np.ones(len(g.indices), dtype=np.int8)
    mat = csr_matrix((data, g.indices, g.indptr),
                     shape=(g.node_count, g.node_count))
    dist = shortest_path(mat, method="D", unweighted=True, directed=False)
    out = np.full(dist.shape, UNREACHABLE, dtype=np.uint32)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.uint32)
    return out


def er_corpus(count: int = 50):
    """The seeded mixed-parameter graph corpus used by the oracle tests."""
    ns = [30, 60, 100, 150, 200]
    ps = [0.02, 0.05, 0.1]
    cs = [1, 2]
    crs = [0.5, 0.7, 0.9]
    for seed in range(count):
        yield (erdos_renyi(ns[seed % 5], ps[seed % 3], seed=seed),
               cs[seed % 2], crs[seed % 3], seed)
