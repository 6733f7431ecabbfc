import math
import random

from distrecon.chordal import (
    chordal_search_budget,
    reconstruct_chordal,
)
from distrecon.generators import gen_chordal, gen_tree
from distrecon.graph import Graph, LayeredView, max_degree
from distrecon.oracles import DistanceOracle
from distrecon.tree import reconstruct_tree

from conftest import complete_graph, path_graph


def test_k4_single_layer():
    g = complete_graph(4)
    oracle = DistanceOracle.from_graph(g)
    res = reconstruct_chordal(oracle, g.n)
    assert res.edges == g.edges()


def test_tree_agrees_with_tree_algorithm():
    g = gen_tree(80, 4, seed=3)
    o1 = DistanceOracle.from_graph(g)
    o2 = DistanceOracle.from_graph(g)
    res_c = reconstruct_chordal(o1, g.n)
    res_t = reconstruct_tree(o2, g.n)
    assert res_c.edges == res_t.edges == g.edges()


def test_base_case_unique_layer1_vertex():
    g = path_graph(3)
    oracle = DistanceOracle.from_graph(g)
    res = reconstruct_chordal(oracle, g.n)
    assert res.edges == g.edges()


def test_lower_neighbourhoods_are_cliques():
    # structural check backing the case-b shortcut, against ground truth
    for seed in range(8):
        g, _ = gen_chordal(120, 5, seed=seed)
        view = LayeredView(g, 0)
        for u in range(g.n):
            i = view.layer_of(u)
            if i == 0:
                continue
            lower = [w for w in g.adjacency[u] if view.layer_of(w) == i - 1]
            for a in lower:
                for b in lower:
                    if a < b:
                        assert g.has_edge(a, b)


def test_within_layer_comparability():
    # for every within-layer edge the lower neighbourhoods are comparable
    for seed in range(8):
        g, _ = gen_chordal(120, 5, seed=seed)
        view = LayeredView(g, 0)
        for u in range(g.n):
            for v in g.adjacency[u]:
                if u < v and view.layer_of(u) == view.layer_of(v) != 0:
                    i = view.layer_of(u)
                    low_u = {w for w in g.adjacency[u] if view.layer_of(w) == i - 1}
                    low_v = {w for w in g.adjacency[v] if view.layer_of(w) == i - 1}
                    assert low_u <= low_v or low_v <= low_u


def test_exact_recovery_sweep():
    rng = random.Random(7)
    for trial in range(40):
        n = rng.randint(2, 250)
        delta = rng.randint(2, 6)
        g, _ = gen_chordal(n, delta, seed=rng.randrange(10**6))
        oracle = DistanceOracle.from_graph(g)
        res = reconstruct_chordal(oracle, g.n, delta=delta)
        assert res.edges == g.edges(), (trial, n, delta)
        assert res.queries == oracle.count


def test_exact_recovery_without_delta_hint():
    rng = random.Random(17)
    for trial in range(20):
        g, _ = gen_chordal(rng.randint(2, 200), rng.randint(2, 6),
                           seed=rng.randrange(10**6))
        oracle = DistanceOracle.from_graph(g)
        res = reconstruct_chordal(oracle, g.n)
        assert res.edges == g.edges()


def test_per_vertex_budget():
    for seed in range(10):
        g, _ = gen_chordal(400, 4, seed=seed)
        d = max_degree(g)
        oracle = DistanceOracle.from_graph(g)
        res = reconstruct_chordal(oracle, g.n, delta=d, collect_stats=True)
        assert res.edges == g.edges()
        budget = chordal_search_budget(g.n, d)
        for u, used, steps in res.details["per_vertex"]:
            assert used <= budget, (seed, u, used, budget)
            assert steps <= math.ceil(math.log2(g.n))


def test_within_layer_query_budget():
    for seed in range(6):
        g, _ = gen_chordal(300, 5, seed=seed)
        d = max_degree(g)
        oracle = DistanceOracle.from_graph(g)
        res = reconstruct_chordal(oracle, g.n, delta=d)
        assert res.edges == g.edges()
        view = LayeredView(g, 0)
        layer_total = sum(len(layer) for layer in view.layers[1:])
        assert res.phase_counts["within_layer"] <= d * d * layer_total


def test_two_separators_deep():
    # long chain of triangles: descents must pass through several separators
    blocks = 300
    edges = []
    for b in range(blocks):
        a = 2 * b
        edges += [(a, a + 1), (a, a + 2), (a + 1, a + 2)]
    g = Graph(2 * blocks + 1, edges)
    oracle = DistanceOracle.from_graph(g)
    res = reconstruct_chordal(oracle, g.n, delta=max_degree(g), collect_stats=True)
    assert res.edges == g.edges()
    assert max(steps for _, _, steps in res.details["per_vertex"]) >= 2
