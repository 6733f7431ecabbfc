"""Seeded random instance generators with construction certificates.

No generator claims uniform sampling over its family; the goal is structural
diversity plus a certificate that the family validator can cross-check.
Generation is a pure function of the generator spec, so identical specs give
byte-identical graphs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .decomposition import TreeDecomposition
from .errors import InfeasibleParameters, WorkBudgetExceeded
from .graph import Graph, is_k_chordal


@dataclass(frozen=True)
class GenSpec:
    family: str  # tree | chordal | kchordal | treelength | lbtree
    n: int
    delta: int
    k: int = 0
    c: int = 1
    seed: int = 0


def gen_tree(n: int, delta: int, seed: int) -> Graph:
    """Random tree with maximum degree <= delta via degree-capped attachment."""
    if n < 1:
        raise InfeasibleParameters("n must be >= 1")
    if n >= 3 and delta < 2:
        raise InfeasibleParameters("trees on >= 3 vertices need delta >= 2")
    rng = random.Random(seed)
    edges = []
    degree = [0] * n
    open_vertices = [0]  # degree < delta
    for v in range(1, n):
        p = open_vertices[rng.randrange(len(open_vertices))]
        edges.append((p, v))
        degree[p] += 1
        degree[v] += 1
        if degree[p] >= delta:
            open_vertices.remove(p)
        if degree[v] < delta:
            open_vertices.append(v)
        if not open_vertices:
            raise InfeasibleParameters("degree cap closed every attachment point")
    return Graph(n, edges)


def gen_chordal(
    n: int,
    delta: int,
    seed: int,
    initial_clique: int | None = None,
) -> tuple[Graph, TreeDecomposition]:
    """Random connected chordal graph of max degree <= delta, plus its
    generating clique tree as certificate.

    Grows a clique tree: each new vertex attaches to a random subset of an
    existing bag (subject to degree caps), forming a new bag. Vertex reuse is
    bounded by the caps, which keeps bag sizes <= delta+1.
    """
    if n < 1:
        raise InfeasibleParameters("n must be >= 1")
    if n >= 3 and delta < 2:
        raise InfeasibleParameters("connected graphs on >= 3 vertices need delta >= 2")
    rng = random.Random(seed)
    degree = [0] * n
    edges: list[tuple[int, int]] = []
    init = initial_clique if initial_clique is not None else rng.randint(
        1, max(1, min(delta + 1, n, 4))
    )
    init = max(1, min(init, n, delta + 1))
    if init == delta + 1 and n > init:
        init = delta  # keep degree headroom for later attachments
    first_bag = list(range(init))
    for i in range(init):
        for j in range(i + 1, init):
            edges.append((i, j))
            degree[i] += 1
            degree[j] += 1
    bags: list[list[int]] = [first_bag]
    bag_parent: list[int] = [-1]
    for v in range(init, n):
        # candidate attachment: random bag, then a subset of its members with
        # degree headroom; the newest bag always retains headroom, so a
        # deterministic scan can never come up empty
        choice = None
        for _ in range(8):
            t = rng.randrange(len(bags))
            avail = [u for u in bags[t] if degree[u] < delta]
            if avail:
                choice = (t, avail)
                break
        if choice is None:
            for t in range(len(bags) - 1, -1, -1):
                avail = [u for u in bags[t] if degree[u] < delta]
                if avail:
                    choice = (t, avail)
                    break
        if choice is None:
            raise InfeasibleParameters(
                f"no attachment point with degree headroom at vertex {v}"
            )
        t, avail = choice
        cap = max(1, min(len(avail), delta - 1))
        size = rng.randint(1, cap)
        sep = sorted(rng.sample(avail, size))
        for u in sep:
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1
        bags.append(sorted(sep + [v]))
        bag_parent.append(t)
    g = Graph(n, edges)
    tree_edges = [(t, p) for t, p in enumerate(bag_parent) if p >= 0]
    cert = TreeDecomposition([frozenset(b) for b in bags], tree_edges, root=0)
    return g, cert


def gen_kchordal(n: int, delta: int, k: int, seed: int,
                 recheck_budget: int = 2 * 10**7) -> Graph:
    """Random k-chordal graph: a chordal base with subdivided triangles.

    Only edges lying in exactly one triangle are subdivided, with at most k-3
    subdivision vertices per triangle in total, so every induced cycle stays
    at or below length k. The constructive certificate is re-checked by the
    enumeration checker when the work budget allows.
    """
    if k < 3:
        raise InfeasibleParameters("k must be >= 3")
    if n < 1:
        raise InfeasibleParameters("n must be >= 1")
    rng = random.Random(seed)
    budget_per_triangle = k - 3
    # leave room for subdivision vertices: aim to spend roughly a third of n
    planned = 0
    if budget_per_triangle > 0 and n >= 8:
        planned = rng.randint(max(1, n // 6), max(1, n // 3))
    base_n = max(2, n - planned)
    g0, _cert = gen_chordal(base_n, delta, seed * 2 + 1)

    # triangles usable for subdivision: edges with exactly one common neighbour
    triangle_of_edge: dict[tuple[int, int], int] = {}
    for u in range(g0.n):
        for v in g0.adjacency[u]:
            if u >= v:
                continue
            common = [w for w in g0.adjacency[u] if g0.has_edge(v, w)]
            if len(common) == 1:
                triangle_of_edge[(u, v)] = common[0]
    edges = set(g0.edges())
    next_vertex = base_n
    spend = n - base_n
    budget_left: dict[tuple[int, int, int], int] = {}
    candidates = sorted(triangle_of_edge)
    rng.shuffle(candidates)
    for u, v in candidates:
        if spend <= 0:
            break
        w = triangle_of_edge[(u, v)]
        tri = tuple(sorted((u, v, w)))
        left = budget_left.get(tri, budget_per_triangle)
        if left <= 0:
            continue
        times = rng.randint(1, min(left, spend))
        # replace edge (u,v) by a path through `times` fresh vertices
        edges.discard((u, v))
        chain = [u] + [next_vertex + i for i in range(times)] + [v]
        next_vertex += times
        for a, b in zip(chain, chain[1:]):
            edges.add((a, b) if a < b else (b, a))
        budget_left[tri] = left - times
        spend -= times
    # any unspent budget becomes pendant path vertices (degree-safe, acyclic)
    if spend > 0:
        deg: dict[int, int] = {}
        for a, b in edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        open_vertices = [x for x in range(next_vertex) if deg.get(x, 0) < delta]
        while spend > 0:
            if not open_vertices:
                raise InfeasibleParameters("cannot place remaining vertices")
            host = open_vertices[rng.randrange(len(open_vertices))]
            edges.add((min(host, next_vertex), max(host, next_vertex)))
            deg[host] = deg.get(host, 0) + 1
            deg[next_vertex] = 1
            if deg[host] >= delta:
                open_vertices.remove(host)
            if 1 < delta:
                open_vertices.append(next_vertex)
            next_vertex += 1
            spend -= 1
    g = Graph(next_vertex, sorted(edges))
    try:
        if not is_k_chordal(g, k, work_budget=recheck_budget):
            raise InfeasibleParameters("generator produced a non-k-chordal graph")
    except WorkBudgetExceeded:
        pass  # certificate stands; enumeration is only a desk-scale cross-check
    return g


def generate(spec: GenSpec):
    """Dispatch on family; returns (graph, certificate-or-None)."""
    if spec.family == "tree":
        return gen_tree(spec.n, spec.delta, spec.seed), None
    if spec.family == "chordal":
        g, cert = gen_chordal(spec.n, spec.delta, spec.seed)
        return g, cert
    if spec.family in ("kchordal", "treelength"):
        return gen_kchordal(spec.n, spec.delta, spec.k, spec.seed), None
    raise InfeasibleParameters(f"unknown family {spec.family!r}")
