"""Deterministic reconstruction of graphs with no long induced cycles.

Layered like the chordal variant, but separators are bags of a
bounded-diameter decomposition of the reconstructed prefix, and each bag is
required to sit well below the frontier: neighbours of a frontier vertex are
connected by short paths inside the prefix, so keeping separators out of a
margin band guarantees the whole lower neighbourhood survives into one
component of every descent step. Within-layer edges only join vertices that
are close in the prefix-plus-frontier graph, which bounds the candidate set.

All distance thresholds scale with max(k, D), where k bounds induced cycle
lengths and D is the certified bag diameter of the constructed decomposition:
the induced-cycle arguments are intrinsic to k, the bag arguments to D.
"""

from __future__ import annotations

import math
from collections import deque

from .decomposition import find_balanced_bag, layering_decomposition_of_subgraph
from .errors import InternalInvariantError, OracleInconsistencyError
from .oracles import DistanceOracle
from .result import ReconstructionResult


def descent_brute_threshold(n: int, delta: int, band: int) -> int:
    """Area size below which a frontier search just queries everything.

    ``band`` is max(k, D). Mirrors the component-size argument that guarantees
    a qualifying separator bag only on large areas.
    """
    base = math.ceil(math.log2(max(n, 2)))
    guard = delta ** ((delta + 2) * band + 1) * (delta**band + 1)
    return max(base, guard)


class _LayerState:
    """Per-layer separator context, built lazily on first descent."""

    def __init__(self, adjacency, prefix: list[int], layer_index: int,
                 root_dist, k: int, delta: int):
        self.adjacency = adjacency
        self.prefix = prefix
        self.layer_index = layer_index
        self.root_dist = root_dist
        self.k = k
        self.delta = delta
        self.td = None
        self.diameter = None

    def ensure_decomposition(self):
        if self.td is None:
            self.td, self.diameter = layering_decomposition_of_subgraph(
                self.adjacency, self.prefix
            )
        return self.td, self.diameter


def frontier_parent_search(
    oracle: DistanceOracle,
    u: int,
    state: _LayerState,
    lower_layer: set[int],
    brute_threshold: int | None = None,
) -> tuple[set[int], int, int, bool]:
    """Exact lower neighbourhood of frontier vertex u.

    Returns (neighbours, queries, descent_steps, used_fallback). The search
    keeps a per-vertex cache so no pair is asked twice within one search.
    """
    adjacency = state.adjacency
    known: dict[int, int] = {}
    used = 0

    def ask(targets):
        nonlocal used
        fresh = [x for x in targets if x not in known]
        if fresh:
            answers = oracle.query_many(u, fresh)
            used += len(fresh)
            for x, d in zip(fresh, answers.tolist()):
                known[x] = int(d)

    area = list(state.prefix)
    steps = 0
    fallback = False
    while True:
        band = max(state.k, state.diameter or 1)
        threshold = (
            brute_threshold
            if brute_threshold is not None
            else descent_brute_threshold(oracle.n, state.delta, band)
        )
        if len(area) <= threshold:
            ask(sorted(area))
            return (
                {x for x in area if known[x] == 1 and x in lower_layer},
                used,
                steps,
                fallback,
            )
        td, diameter = state.ensure_decomposition()
        band = max(state.k, diameter)
        margin_cap = state.layer_index - state.delta * band - 1
        try:
            found = find_balanced_bag(
                td, adjacency, set(area),
                layer_cap=(state.root_dist, margin_cap),
            )
        except InternalInvariantError:
            # no qualifying bag this far below the frontier; brute force
            fallback = True
            ask(sorted(area))
            return (
                {x for x in area if known[x] == 1 and x in lower_layer},
                used,
                steps,
                fallback,
            )
        bag = found.bag
        if any(state.root_dist[x] > margin_cap for x in bag):
            raise InternalInvariantError("separator bag violates the margin")
        hood = set(bag)
        for x in bag:
            hood.update(adjacency[x])
        hood_sorted = sorted(hood)
        ask(hood_sorted)
        best = min((known[x], x) for x in hood_sorted)
        cands = [x for x in hood_sorted if known[x] == best[0]]
        comp_sets = [set(c) for c in found.components]
        target = None
        for x in cands:
            for idx, cs in enumerate(comp_sets):
                if x in cs:
                    target = idx
                    break
            if target is not None:
                break
        if target is None:
            adjacent = set()
            for x in cands:
                for y in adjacency[x]:
                    for idx, cs in enumerate(comp_sets):
                        if y in cs:
                            adjacent.add(idx)
            if len(adjacent) != 1:
                raise InternalInvariantError(
                    "descent component ambiguous below the margin"
                )
            target = adjacent.pop()
        child = found.components[target]
        if 2 * len(child) > len(area):
            raise InternalInvariantError("descent step did not halve the area")
        steps += 1
        if steps > math.ceil(math.log2(max(oracle.n, 2))):
            raise InternalInvariantError("descent exceeded its step budget")
        area = sorted(child)


def within_layer_edges(
    oracle: DistanceOracle,
    layer: list[int],
    adjacency,
    radius: int,
) -> tuple[set[tuple[int, int]], int]:
    """Edges inside one layer: probe pairs within ``radius`` hops in the graph
    made of the prefix plus the already-found frontier attachments."""
    edges: set[tuple[int, int]] = set()
    used = 0
    layer_set = set(layer)
    for u in layer:
        # bounded BFS in the working graph
        dist = {u: 0}
        dq = deque([u])
        while dq:
            x = dq.popleft()
            if dist[x] == radius:
                continue
            for y in adjacency[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    dq.append(y)
        targets = sorted(v for v in dist if v in layer_set and v != u)
        if targets:
            answers = oracle.query_many(u, targets)
            used += len(targets)
            for v, d in zip(targets, answers.tolist()):
                if d == 1:
                    edges.add((u, v) if u < v else (v, u))
    return edges, used


def reconstruct_kchordal(
    oracle: DistanceOracle,
    n: int,
    k: int,
    delta: int,
    brute_threshold: int | None = None,
    collect_stats: bool = False,
) -> ReconstructionResult:
    """Reconstruct a hidden graph with no induced cycle longer than k.

    ``delta`` bounds the maximum degree (needed for margins and thresholds).
    ``brute_threshold`` overrides the brute-force area size, which tests use
    to exercise the separator path on instances far below the safe default.
    """
    if k < 3:
        raise ValueError("k must be >= 3")
    start_count = oracle.count
    root_row = oracle.query_many(0, range(n))
    ecc = int(root_row.max()) if n > 0 else 0
    layers: list[list[int]] = [[] for _ in range(ecc + 1)]
    for v in range(n):
        layers[int(root_row[v])].append(v)
    if len(layers[0]) != 1:
        raise OracleInconsistencyError("several vertices at distance 0 from root")

    adjacency: list[list[int]] = [[] for _ in range(n)]
    edges: set[tuple[int, int]] = set()

    def add_edge(a, b):
        edges.add((a, b) if a < b else (b, a))
        adjacency[a].append(b)
        adjacency[b].append(a)

    bootstrap_radius = min(2 * delta * k, ecc)
    boot = [v for v in range(n) if root_row[v] <= bootstrap_radius]
    block = oracle.query_block(boot, boot)
    bootstrap_queries = len(boot) * len(boot)
    for ia, a in enumerate(boot):
        for ib in range(ia + 1, len(boot)):
            if block[ia, ib] == 1:
                add_edge(a, boot[ib])

    parent_queries = 0
    within_queries = 0
    stats = []
    prefix = list(boot)
    diameter_used = 1
    for i in range(bootstrap_radius + 1, ecc + 1):
        state = _LayerState(adjacency, prefix, i, root_row, k, delta)
        lower_layer = set(layers[i - 1])
        layer_lower: dict[int, set[int]] = {}
        for u in layers[i]:
            nbrs, used, steps, fb = frontier_parent_search(
                oracle, u, state, lower_layer, brute_threshold
            )
            parent_queries += used
            if collect_stats:
                stats.append((u, used, steps, fb))
            if not nbrs:
                raise OracleInconsistencyError(f"vertex {u} has no lower neighbour")
            layer_lower[u] = nbrs
            for w in nbrs:
                add_edge(w, u)
        if state.diameter is not None:
            diameter_used = max(diameter_used, state.diameter)
        band = max(k, diameter_used)
        radius = 2 * delta * band + 2
        eii, qii = within_layer_edges(oracle, layers[i], adjacency, radius)
        within_queries += qii
        for a, b in eii:
            add_edge(a, b)
        prefix = prefix + layers[i]

    total = oracle.count - start_count
    result = ReconstructionResult(
        algorithm="kchordal",
        n=n,
        edges=edges,
        queries=total,
        phase_counts={
            "layering": n,
            "bootstrap": bootstrap_queries,
            "parent_search": parent_queries,
            "within_layer": within_queries,
        },
    )
    if collect_stats:
        result.details["per_vertex"] = stats
    return result
