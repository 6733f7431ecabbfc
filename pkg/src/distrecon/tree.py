"""Deterministic tree reconstruction with centroid descent, plus the
randomized query-order variant.

The hidden tree is reconstructed layer by layer around a root: an initial
batch query yields the BFS layering, then each frontier vertex finds its
parent by descending a chain of centroid separators of the already
reconstructed tree, querying separator neighbourhoods and keeping the
component closest to the vertex. With components ordered by decreasing size
the whole run needs at most delta*n*log_delta(n) + (delta+2)*n queries.
"""

from __future__ import annotations

import math
import random

from .errors import OracleInconsistencyError
from .oracles import DistanceOracle
from .result import ReconstructionResult


def centroid(adjacency, vertices) -> int:
    """A vertex whose removal leaves components of size <= |vertices|//2.

    Ties broken by smallest vertex id; the set must induce a connected subtree.
    """
    verts = sorted(vertices)
    inside = {v: True for v in verts}
    s = len(verts)
    if s == 1:
        return verts[0]
    root = verts[0]
    parent = {root: root}
    order = [root]
    stack = [root]
    while stack:
        u = stack.pop()
        for w in adjacency[u]:
            if w in inside and w not in parent:
                parent[w] = u
                order.append(w)
                stack.append(w)
    if len(order) != s:
        raise OracleInconsistencyError("vertex set does not induce a subtree")
    size = dict.fromkeys(order, 1)
    for u in reversed(order[1:]):
        size[parent[u]] += size[u]
    best_key = None
    for v in order:
        largest = s - size[v]
        for w in adjacency[v]:
            if w in inside and parent.get(w) == v:
                largest = max(largest, size[w])
        key = (largest, v)
        if best_key is None or key < best_key:
            best_key = key
    if best_key[0] > s // 2:
        raise OracleInconsistencyError("no centroid found")
    return best_key[1]


def random_component_order(sizes, rng: random.Random | int | None = None) -> list[int]:
    """Random order of component indices: draw X_i uniform on [0, size_i] and
    sort descending. Exact float ties trigger a deterministic re-draw.

    ``rng`` may be a Random instance (shared across a run) or a seed.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    if any(s <= 0 for s in sizes):
        raise ValueError("component sizes must be positive")
    if len(sizes) == 1:
        return [0]
    while True:
        draws = [rng.uniform(0.0, s) for s in sizes]
        if len(set(draws)) == len(draws):
            break
    return sorted(range(len(sizes)), key=lambda i: -draws[i])


class _DescentTree:
    """Separator structure over one reconstructed prefix, expanded lazily so
    rebuilding per layer stays cheap; shared scratch buffers avoid dict churn.

    A node is [verts, sep, entries, children]; ``entries`` holds
    (neighbour, component size) pairs sorted by decreasing size then id.
    """

    __slots__ = ("adjacency", "base", "mark", "parent", "size", "root")

    def __init__(self, adjacency, vertices: list[int], base_threshold: int, n: int):
        self.adjacency = adjacency
        self.base = max(base_threshold, 1)
        self.mark = bytearray(n)
        self.parent = [0] * n
        self.size = [0] * n
        self.root = [vertices, None, None, None]

    def expand(self, node) -> None:
        verts = node[0]
        if node[1] is not None or len(verts) <= self.base:
            return
        adjacency = self.adjacency
        mark = self.mark
        parent = self.parent
        size = self.size
        for v in verts:
            mark[v] = 1
            size[v] = 1
        s = len(verts)
        root = verts[0]
        parent[root] = root
        mark[root] = 2
        order = [root]
        stack = [root]
        while stack:
            u = stack.pop()
            for w in adjacency[u]:
                if mark[w] == 1:
                    mark[w] = 2
                    parent[w] = u
                    order.append(w)
                    stack.append(w)
        if len(order) != s:
            for v in verts:
                mark[v] = 0
            raise OracleInconsistencyError("prefix is not a connected subtree")
        for idx in range(s - 1, 0, -1):
            u = order[idx]
            size[parent[u]] += size[u]
        best_largest = s
        best_v = -1
        half = s // 2
        for v in order:
            largest = s - size[v]
            if largest > best_largest:
                continue
            for w in adjacency[v]:
                if mark[w] == 2 and parent[w] == v and w != root:
                    sw = size[w]
                    if sw > largest:
                        largest = sw
            if largest < best_largest or (largest == best_largest and v < best_v):
                best_largest = largest
                best_v = v
        if best_largest > half:
            for v in verts:
                mark[v] = 0
            raise OracleInconsistencyError("no centroid found")
        sep = best_v
        # split into components around sep; mark is consumed back to 0
        mark[sep] = 0
        comps = []
        for w in sorted(adjacency[sep]):
            if not mark[w]:
                continue
            comp = [w]
            mark[w] = 0
            head = 0
            while head < len(comp):
                u = comp[head]
                head += 1
                for x in adjacency[u]:
                    if mark[x]:
                        mark[x] = 0
                        comp.append(x)
            comps.append((w, comp))
        comps.sort(key=lambda wc: (-len(wc[1]), wc[0]))
        node[1] = sep
        node[2] = [(w, len(c)) for w, c in comps]
        node[3] = [[c, None, None, None] for _, c in comps]

    def node_view(self, node):
        self.expand(node)
        verts, sep, entries, children = node
        if sep is None:
            return None, verts, None, None
        return sep, None, entries, children


class _PathDescent:
    """Interval specialization used while the reconstructed prefix is a path.

    Produces exactly the same separators, component orders and tie-breaks as
    the generic structure, in O(1) per node instead of O(interval).
    """

    __slots__ = ("at", "lo", "hi", "base", "root")

    def __init__(self, at: dict[int, int], lo: int, hi: int, base_threshold: int):
        self.at = at  # position -> vertex id
        self.lo = lo
        self.hi = hi
        self.base = max(base_threshold, 1)
        self.root = (lo, hi)

    def node_view(self, node):
        lo, hi = node
        s = hi - lo + 1
        at = self.at
        if s <= self.base:
            return None, [at[p] for p in range(lo, hi + 1)], None, None
        j1 = lo + (s - 1) // 2
        j2 = lo + s // 2
        if j1 != j2 and at[j2] < at[j1]:
            mid = j2
        else:
            mid = j1
        entries = []
        children = []
        if mid > lo:
            entries.append((at[mid - 1], mid - lo, (lo, mid - 1)))
        if mid < hi:
            entries.append((at[mid + 1], hi - mid, (mid + 1, hi)))
        entries.sort(key=lambda e: (-e[1], e[0]))
        children = [e[2] for e in entries]
        return at[mid], None, [(w, sz) for w, sz, _ in entries], children


def parent_search(
    oracle: DistanceOracle,
    v: int,
    descent,
    rng: random.Random | None = None,
    trace: list | None = None,
) -> tuple[int, int]:
    """Locate v's unique neighbour inside the prefix covered by ``descent``.

    Returns (parent, queries_used). Separator neighbourhoods are queried in
    decreasing component-size order (or in the randomized order when ``rng``
    is given), stopping as soon as two distinct distances are seen; an
    all-equal answer pattern identifies the separator itself as the parent
    without ever querying it.
    """
    used = 0
    node = descent.root
    query = oracle.query
    while True:
        sep, base_verts, entries, children = descent.node_view(node)
        if sep is None:
            # base case: few enough vertices to query wholesale
            order = sorted(base_verts)
            dists = oracle.query_many(v, order)
            used += len(order)
            for w, d in zip(order, dists.tolist()):
                if d == 1:
                    return w, used
            raise OracleInconsistencyError(
                f"no parent at distance 1 for vertex {v}; hidden graph is not a tree"
            )
        if rng is None:
            positions = range(len(entries))
        else:
            positions = random_component_order([sz for _, sz in entries], rng)
        first_d = None
        best_d = None
        best_pos = None
        step_used = 0
        descend_to = None
        for pos in positions:
            w = entries[pos][0]
            d = query(v, w)
            used += 1
            step_used += 1
            if best_d is None or (d, pos) < (best_d, best_pos):
                best_d, best_pos = d, pos
            if first_d is None:
                first_d = d
            elif d != first_d:
                descend_to = best_pos
                break
        if trace is not None:
            trace.append(
                (node if isinstance(node, tuple) else len(node[0]),
                 tuple(sz for _, sz in entries), step_used,
                 entries[descend_to][1] if descend_to is not None else 0)
            )
        if descend_to is None:
            # every neighbour is equidistant from v, so sep is the parent
            return sep, used
        node = children[descend_to]


def _trace_sizes(trace, descent):
    """Normalize entries to (size_before, component_sizes, queries, size_after)."""
    out = []
    for before, sizes, used, after in trace:
        if isinstance(before, tuple):
            before = before[1] - before[0] + 1
        out.append((before, sizes, used, after))
    return out


def reconstruct_tree(
    oracle: DistanceOracle,
    n: int,
    order: str = "deterministic",
    seed: int | None = None,
    collect_trace: bool = False,
) -> ReconstructionResult:
    """Reconstruct a hidden tree exactly from a counting distance oracle.

    ``order`` selects the separator-neighbourhood query order: "deterministic"
    (decreasing component size) or "randomized" (the randomized-order
    primitive). Vertices are processed by increasing distance from the root;
    the initial batch against the root is charged n queries.
    """
    if order not in ("deterministic", "randomized"):
        raise ValueError("order must be 'deterministic' or 'randomized'")
    rng = random.Random(seed) if order == "randomized" else None
    start_count = oracle.count

    root_row = oracle.query_many(0, range(n))
    ecc = int(root_row.max()) if n > 0 else 0
    layers: list[list[int]] = [[] for _ in range(ecc + 1)]
    for v in range(n):
        layers[int(root_row[v])].append(v)
    if len(layers[0]) != 1:
        raise OracleInconsistencyError("several vertices at distance 0 from root")

    edges: set[tuple[int, int]] = set()
    adjacency: list[list[int]] = [[] for _ in range(n)]
    parent_queries = 0
    traces: list[list] = []
    max_deg = 0
    # path bookkeeping: valid while the prefix is a path (max degree <= 2)
    position: dict[int, int] = {0: 0}
    at: dict[int, int] = {0: 0}
    path_lo = path_hi = 0

    def add_edge(p: int, v: int):
        nonlocal max_deg, path_lo, path_hi
        edges.add((p, v) if p < v else (v, p))
        adjacency[p].append(v)
        adjacency[v].append(p)
        max_deg = max(max_deg, len(adjacency[p]), len(adjacency[v]))
        if max_deg <= 2:
            if position.get(p) == path_lo:
                path_lo -= 1
                position[v] = path_lo
                at[path_lo] = v
            elif position.get(p) == path_hi:
                path_hi += 1
                position[v] = path_hi
                at[path_hi] = v
            else:  # attachment mid-path means the path lane is already dead
                max_deg = 3

    prefix: list[int] = [0]
    if ecc >= 1:
        for u in layers[1]:
            add_edge(0, u)
        prefix += layers[1]

    for i in range(2, ecc + 1):
        base_threshold = max(max_deg, 2) + 1
        if max_deg <= 2:
            descent = _PathDescent(at, path_lo, path_hi, base_threshold)
        else:
            descent = _DescentTree(adjacency, list(prefix), base_threshold, n)
        for v in layers[i]:
            trace: list | None = [] if collect_trace else None
            p, used = parent_search(oracle, v, descent, rng=rng, trace=trace)
            parent_queries += used
            if collect_trace:
                traces.append(_trace_sizes(trace, descent))
            add_edge(p, v)
        prefix += layers[i]

    total = oracle.count - start_count
    result = ReconstructionResult(
        algorithm=f"tree-{order}",
        n=n,
        edges=edges,
        queries=total,
        phase_counts={"layering": n, "parent_search": parent_queries},
        seed=seed,
    )
    if collect_trace:
        result.details["traces"] = traces
    return result


def tree_query_bound(n: int, delta: int) -> float:
    """Worst-case query budget for the deterministic order."""
    if n <= 1:
        return float(n)
    d = max(delta, 2)
    return d * n * math.log(n, d) + (d + 2) * n
