import numpy as np
import pytest

from distrecon.graph import Graph


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def floyd_warshall(g: Graph) -> np.ndarray:
    """Independent all-pairs oracle, kept deliberately naive."""
    n = g.n
    dist = np.full((n, n), n + 1, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for u in range(n):
        for v in g.adjacency[u]:
            dist[u, v] = 1
    for mid in range(n):
        dist = np.minimum(dist, dist[:, [mid]] + dist[[mid], :])
    return dist


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
