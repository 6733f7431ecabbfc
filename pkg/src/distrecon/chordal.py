"""Deterministic chordal-graph reconstruction via clique-separator descent.

Layer by layer, each frontier vertex locates its lower neighbourhood by
descending a chain of balanced clique separators (bags of a clique tree of
the reconstructed prefix, recomputed per layer). Because lower
neighbourhoods of chordal graphs are cliques, touching one separator vertex
pins the whole neighbourhood; otherwise one extra neighbourhood probe picks
the component to descend into. Within-layer edges follow from the
comparability of lower neighbourhoods, which caps candidate pairs per vertex.
"""

from __future__ import annotations

import math

from .decomposition import clique_tree_of_subgraph, find_balanced_bag
from .errors import InternalInvariantError, OracleInconsistencyError
from .oracles import DistanceOracle
from .result import ReconstructionResult


class _BagDescent:
    """Lazily expanded separator structure over one reconstructed prefix;
    nodes are shared by all frontier searches of the layer."""

    __slots__ = ("adjacency", "td", "threshold")

    def __init__(self, adjacency, prefix: list[int], threshold: int):
        self.adjacency = adjacency
        self.td = clique_tree_of_subgraph(adjacency, prefix)
        self.threshold = threshold

    def make_root(self, prefix: list[int]):
        return [prefix, None, None]  # verts, bag, children

    def expand(self, node):
        if node[1] is not None or len(node[0]) <= self.threshold:
            return
        found = find_balanced_bag(self.td, self.adjacency, set(node[0]))
        node[1] = found.bag
        node[2] = [[sorted(c), None, None] for c in found.components]


def parent_clique_search(
    oracle: DistanceOracle,
    u: int,
    descent: _BagDescent,
    root_node,
    lower_layer: set[int],
    case_c_bags: set | None = None,
) -> tuple[set[int], int, int]:
    """Exact lower neighbourhood of frontier vertex u.

    Returns (neighbours, queries_used, descent_steps). Distances already known
    within this search are never re-queried.
    """
    adjacency = descent.adjacency
    known: dict[int, int] = {}
    used = 0

    def ask(targets) -> None:
        nonlocal used
        fresh = [x for x in targets if x not in known]
        if fresh:
            answers = oracle.query_many(u, fresh)
            used += len(fresh)
            for x, d in zip(fresh, answers.tolist()):
                known[x] = int(d)

    node = root_node
    steps = 0
    while True:
        descent.expand(node)
        verts, bag, children = node
        if bag is None:
            ask(verts)
            return (
                {x for x in verts if known[x] == 1},
                used,
                steps,
            )
        bag_sorted = sorted(bag)
        ask(bag_sorted)
        d_bag = min(known[x] for x in bag_sorted)
        if d_bag == 1:
            # lower neighbourhood is a clique through the touched bag vertex,
            # so it lies inside the bag's closed neighbourhood
            hood = set(bag)
            for x in bag_sorted:
                hood.update(adjacency[x])
            cands = sorted(v for v in hood if v in lower_layer)
            ask(cands)
            return ({x for x in cands if known[x] == 1}, used, steps)
        # descend: cheapest bag vertex, then one closed-neighbourhood probe
        if case_c_bags is not None:
            case_c_bags.add(bag)
        w = min(bag_sorted, key=lambda x: (known[x], x))
        hood_w = sorted(set(adjacency[w]) | {w})
        ask(hood_w)
        want = known[w] - 1
        cands = [x for x in hood_w if known[x] == want]
        if not cands:
            raise OracleInconsistencyError(
                f"no vertex below distance {known[w]} around separator vertex {w}"
            )
        steps += 1
        inside = [x for x in cands if x not in bag]
        target = None
        comp_sets = [set(c[0]) for c in children]
        for x in inside:
            for idx, cs in enumerate(comp_sets):
                if x in cs:
                    target = idx
                    break
            if target is not None:
                break
        if target is None:
            # the minimiser sits outside the active area; its component is
            # still adjacent to the one holding the lower neighbourhood
            adjacent_comps = set()
            for x in cands:
                for y in adjacency[x]:
                    for idx, cs in enumerate(comp_sets):
                        if y in cs:
                            adjacent_comps.add(idx)
            if len(adjacent_comps) != 1:
                raise InternalInvariantError(
                    "descent component ambiguous; separator guarantee violated"
                )
            target = adjacent_comps.pop()
        child = children[target]
        if len(child[0]) * 2 > len(verts):
            raise InternalInvariantError("descent step did not halve the area")
        node = child


def reconstruct_within_layer(
    oracle: DistanceOracle,
    layer: list[int],
    lower_neighbours: dict[int, set[int]],
    upper_of: dict[int, list[int]],
) -> tuple[set[tuple[int, int]], int, int]:
    """Edges inside one layer, probing only comparable-lower-neighbourhood pairs.

    Returns (edges, queries, candidate_pairs). ``upper_of`` maps each vertex of
    the layer below to its known neighbours in this layer.
    """
    edges: set[tuple[int, int]] = set()
    used = 0
    pairs = 0
    layer_set = set(layer)
    for u in layer:
        low_u = lower_neighbours[u]
        cands = set()
        for w in low_u:
            cands.update(upper_of.get(w, ()))
        cands &= layer_set
        targets = []
        for v in sorted(cands):
            if v <= u:
                continue
            low_v = lower_neighbours[v]
            if low_u <= low_v or low_v <= low_u:
                targets.append(v)
        if targets:
            answers = oracle.query_many(u, targets)
            used += len(targets)
            pairs += len(targets)
            for v, d in zip(targets, answers.tolist()):
                if d == 1:
                    edges.add((u, v))
    return edges, used, pairs


def reconstruct_chordal(
    oracle: DistanceOracle,
    n: int,
    delta: int | None = None,
    collect_stats: bool = False,
) -> ReconstructionResult:
    """Reconstruct a hidden chordal graph exactly from distance queries.

    ``delta`` is the degree bound used in the brute-force threshold
    4*delta*log2(n); when omitted, the running maximum degree of the
    reconstructed prefix stands in (the threshold only shrinks, which keeps
    every step correct on the graphs this is specified for).
    """
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
    max_deg = 0

    def add_edge(a: int, b: int):
        nonlocal max_deg
        edges.add((a, b) if a < b else (b, a))
        adjacency[a].append(b)
        adjacency[b].append(a)
        max_deg = max(max_deg, len(adjacency[a]), len(adjacency[b]))

    parent_queries = 0
    within_queries = 0
    stats: list[tuple[int, int, int]] = []  # (vertex, queries, steps)

    lower_neighbours: dict[int, set[int]] = {}
    if ecc >= 1:
        for u in layers[1]:
            add_edge(0, u)
            lower_neighbours[u] = {0}
        upper_of = {0: list(layers[1])}
        e11, q11, _ = reconstruct_within_layer(
            oracle, layers[1], lower_neighbours, upper_of
        )
        within_queries += q11
        for a, b in e11:
            add_edge(a, b)

    prefix: list[int] = [0] + (layers[1] if ecc >= 1 else [])
    for i in range(2, ecc + 1):
        dd = delta if delta is not None else max(max_deg, 1)
        threshold = math.ceil(4 * dd * math.log2(max(n, 2)))
        descent = _BagDescent(adjacency, prefix, threshold)
        root_node = descent.make_root(prefix)
        lower_layer = set(layers[i - 1])
        case_c_bags: set[frozenset[int]] = set()

        layer_lower: dict[int, set[int]] = {}
        for u in layers[i]:
            nbrs, used, steps = parent_clique_search(
                oracle, u, descent, root_node, lower_layer, case_c_bags
            )
            parent_queries += used
            if collect_stats:
                stats.append((u, used, steps))
            if not nbrs:
                raise OracleInconsistencyError(f"vertex {u} has no lower neighbour")
            layer_lower[u] = nbrs
            for w in nbrs:
                add_edge(w, u)
        lower_neighbours.update(layer_lower)

        upper_of = {}
        for u in layers[i]:
            for w in layer_lower[u]:
                upper_of.setdefault(w, []).append(u)
        eii, qii, _ = reconstruct_within_layer(
            oracle, layers[i], layer_lower, upper_of
        )
        within_queries += qii
        for a, b in eii:
            add_edge(a, b)
        # separators used for descents must sit clear of the frontier layer
        frontier = set(layers[i])
        for bag in case_c_bags:
            for x in bag:
                if any(y in frontier for y in adjacency[x]):
                    raise InternalInvariantError(
                        "descent separator touches the frontier layer"
                    )
        prefix = prefix + layers[i]

    total = oracle.count - start_count
    result = ReconstructionResult(
        algorithm="chordal",
        n=n,
        edges=edges,
        queries=total,
        phase_counts={
            "layering": n,
            "parent_search": parent_queries,
            "within_layer": within_queries,
        },
    )
    if collect_stats:
        result.details["per_vertex"] = stats
    return result


def chordal_search_budget(n: int, delta: int) -> float:
    """Per-vertex budget for the clique-separator search."""
    logn = math.log2(max(n, 2))
    return 2 * delta * math.ceil(logn) + max(
        math.ceil(4 * delta * logn), delta * (delta + 1)
    )
