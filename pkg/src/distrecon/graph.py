"""Ground-truth graph representation, distances, and structural validators.

Vertices are dense integers 0..n-1. Graphs are simple, undirected and
connected; both properties are enforced at construction time so that
downstream code never re-checks them.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .errors import GraphError, WorkBudgetExceeded

# Enumeration checkers are test oracles, not production primitives; they stop
# with a loud signal instead of running unbounded.
DEFAULT_WORK_BUDGET = 10**8


class Graph:
    """Immutable simple undirected connected graph with sorted adjacency lists."""

    __slots__ = ("n", "adjacency", "_adjsets", "_edge_count")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], validate: bool = True):
        self.n = n
        adj: list[list[int]] = [[] for _ in range(n)]
        adjsets: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if v in adjsets[u]:
                raise GraphError(f"duplicate edge ({u},{v})")
            adjsets[u].add(v)
            adjsets[v].add(u)
            adj[u].append(v)
            adj[v].append(u)
            m += 1
        for lst in adj:
            lst.sort()
        self.adjacency = adj
        self._adjsets = adjsets
        self._edge_count = m
        if validate and n > 0 and len(self._bfs_reach(0)) != n:
            raise GraphError("graph is not connected")

    def _bfs_reach(self, source: int) -> list[int]:
        seen = bytearray(self.n)
        seen[source] = 1
        out = [source]
        dq = deque([source])
        while dq:
            u = dq.popleft()
            for w in self.adjacency[u]:
                if not seen[w]:
                    seen[w] = 1
                    out.append(w)
                    dq.append(w)
        return out

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def edges(self) -> set[tuple[int, int]]:
        """Edge set as (min, max) pairs."""
        return {(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v}

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjsets[u]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> list[int]:
        return self.adjacency[v]

    def to_csr(self) -> sp.csr_matrix:
        rows = []
        cols = []
        for u in range(self.n):
            for v in self.adjacency[u]:
                rows.append(u)
                cols.append(v)
        data = np.ones(len(rows), dtype=np.int8)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def is_tree(self) -> bool:
        return self._edge_count == self.n - 1

    def __repr__(self) -> str:  # pragma: no cover
        return f"Graph(n={self.n}, m={self._edge_count})"


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Exact hop distances from ``source`` to every vertex."""
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} out of range")
    dist = np.full(g.n, -1, dtype=np.int32)
    dist[source] = 0
    dq = deque([source])
    while dq:
        u = dq.popleft()
        du = dist[u]
        for w in g.adjacency[u]:
            if dist[w] < 0:
                dist[w] = du + 1
                dq.append(w)
    return dist


def max_degree(g: Graph) -> int:
    """Maximum vertex degree."""
    return max((len(a) for a in g.adjacency), default=0)


def _tree_distance_matrix(g: Graph) -> np.ndarray:
    # Row of a child differs from its parent's row by +-1 depending on
    # subtree membership, which an Euler interval test gives in O(1) per entry.
    n = g.n
    parent = np.full(n, -1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int32)
    order = [0]
    seen = bytearray(n)
    seen[0] = 1
    dq = deque([0])
    while dq:
        u = dq.popleft()
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = 1
                parent[w] = u
                depth[w] = depth[u] + 1
                order.append(w)
                dq.append(w)
    tin = np.zeros(n, dtype=np.int64)
    tout = np.zeros(n, dtype=np.int64)
    t = 1
    visited = bytearray(n)
    visited[0] = 1
    stack: list[tuple[int, Iterable[int]]] = [(0, iter(g.adjacency[0]))]
    while stack:
        u, it = stack[-1]
        advanced = False
        for w in it:
            if not visited[w]:
                visited[w] = 1
                tin[w] = t
                t += 1
                stack.append((w, iter(g.adjacency[w])))
                advanced = True
                break
        if not advanced:
            tout[u] = t
            stack.pop()
    dist = np.zeros((n, n), dtype=np.int32)
    dist[0] = depth
    for v in order[1:]:
        row = dist[parent[v]] + 1
        row[(tin >= tin[v]) & (tin < tout[v])] -= 2
        dist[v] = row
    return dist


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Full n x n hop-distance matrix (exact, int32)."""
    if g.n == 1:
        return np.zeros((1, 1), dtype=np.int32)
    if g.is_tree():
        return _tree_distance_matrix(g)
    d = shortest_path(g.to_csr(), method="auto", unweighted=True, directed=False)
    return d.astype(np.int32)


def distances_from_sources(g: Graph, sources: Sequence[int]) -> np.ndarray:
    """Hop distances from each source row; cheaper than the full matrix."""
    if len(sources) == 0:
        return np.zeros((0, g.n), dtype=np.int32)
    d = shortest_path(
        g.to_csr(), method="auto", unweighted=True, directed=False, indices=list(sources)
    )
    return np.atleast_2d(d).astype(np.int32)


class LayeredView:
    """Partition of the vertex set into BFS layers around a root."""

    def __init__(self, g: Graph, root: int = 0):
        self.root = root
        self.distances = bfs_distances(g, root)
        self.eccentricity = int(self.distances.max())
        self.layers: list[list[int]] = [[] for _ in range(self.eccentricity + 1)]
        for v in range(g.n):
            self.layers[self.distances[v]].append(v)

    def layer_of(self, v: int) -> int:
        return int(self.distances[v])


def validate_distance_matrix(g: Graph, dist: np.ndarray) -> None:
    """Check symmetry, zero diagonal, edge <=> distance 1, triangle inequality."""
    n = g.n
    if dist.shape != (n, n):
        raise GraphError("distance matrix shape mismatch")
    if not np.array_equal(dist, dist.T):
        raise GraphError("distance matrix not symmetric")
    if np.any(np.diag(dist) != 0):
        raise GraphError("distance matrix has nonzero diagonal")
    ones = set(zip(*np.nonzero(dist == 1)))
    for u in range(n):
        for v in g.adjacency[u]:
            if (u, v) not in ones:
                raise GraphError(f"edge ({u},{v}) not at distance 1")
    if len(ones) != 2 * g.edge_count:
        raise GraphError("distance-1 pairs that are not edges")
    # Triangle inequality via one random anchor sweep per vertex would miss
    # violations; do the full check only at small n.
    if n <= 200:
        for w in range(n):
            if np.any(dist > dist[:, [w]] + dist[[w], :]):
                raise GraphError("triangle inequality violated")


def is_k_chordal(
    g: Graph, k: int, work_budget: int = DEFAULT_WORK_BUDGET
) -> bool:
    """True iff the graph has no induced cycle of length >= k+1.

    Enumerates chordless cycles by extending chordless paths from a canonical
    least vertex, with pruning. Intended for desk-scale instances; raises
    WorkBudgetExceeded beyond ``work_budget`` basic steps.
    """
    if k < 3:
        raise ValueError("k must be >= 3")
    target = k + 1
    adjsets = g._adjsets
    steps = 0
    # Each chordless cycle is discovered from its least vertex u. A growing
    # chordless path u, p1, ..., head is extended by vertices not adjacent to
    # any interior vertex; a neighbour of u closes a cycle and is never pushed
    # (it would carry a chord back to u otherwise).
    for u in range(g.n):
        for first in g.adjacency[u]:
            if first < u:
                continue
            stack = [(first, 2, frozenset((u, first)))]
            while stack:
                head, length, forbidden = stack.pop()
                for w in g.adjacency[head]:
                    steps += 1
                    if steps > work_budget:
                        raise WorkBudgetExceeded(
                            "induced-cycle enumeration budget hit"
                        )
                    if w < u or w in forbidden:
                        continue
                    if w in adjsets[u]:
                        if w != first and length + 1 >= target:
                            return False
                        continue
                    stack.append(
                        (w, length + 1, forbidden | adjsets[head] | {w})
                    )
    return True


def parse_graph_text(text: str) -> Graph:
    """Parse the on-disk format: first line "n m", then m lines "u v" (0-based)."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise GraphError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphError(f"non-integer header: {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise GraphError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line: {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphError(f"non-integer edge line: {ln!r}") from exc
        edges.append((u, v))
    return Graph(n, edges)


def read_graph_file(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


def write_graph_file(path, g: Graph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n} {g.edge_count}\n")
        for u, v in sorted(g.edges()):
            fh.write(f"{u} {v}\n")
