import random

import numpy as np
import pytest

from distrecon.graph import all_pairs_distances, max_degree
from distrecon.lowerbound import (
    LowerBoundTree,
    distance_query_as_word_query,
    lb_tree_distance,
    learn_partition,
    random_balanced_function,
    reconstruct_balanced_function,
    recover_leaf_labels,
)
from distrecon.oracles import (
    CoordinateOracle,
    MembershipOracle,
    WordOracle,
    word_query_via_coordinates,
)


def test_tree_shape_fig_parameters():
    t = LowerBoundTree(2, 4, 1, seed=0)
    assert t.n_leaves == 8
    assert t.n_nodes == 13
    # degree bound delta+1; at depth k=1 the internals have c+1 < delta+1
    assert max_degree(t.graph) == 4
    assert max_degree(t.graph) <= 4 + 1


def test_tree_shape_star_base():
    t = LowerBoundTree(1, 2, 0, seed=0)
    assert t.n_internal == 1 and t.n_leaves == 1


def test_tree_shape_counts_and_degree():
    t = LowerBoundTree(1, 3, 2, seed=5)
    assert t.n_leaves == 9
    assert t.n_nodes == 1 + 3 + 9 + 9
    assert max_degree(t.graph) == 4  # delta + 1


def test_tree_degree_invariants():
    t = LowerBoundTree(2, 3, 2, seed=1)
    for lab, node in t.id_of_label.items():
        kids = t.children_of_internal(node)
        if len(lab) < t.k:
            assert len(kids) == t.delta
        else:
            assert len(kids) == t.c


@pytest.mark.parametrize("c,delta,k", [(2, 4, 1), (1, 3, 3), (1, 2, 5)])
def test_distance_formula_matches_bfs_all_pairs(c, delta, k):
    t = LowerBoundTree(c, delta, k, seed=3)
    dist = all_pairs_distances(t.graph)
    for x in range(t.n_nodes):
        for y in range(t.n_nodes):
            assert lb_tree_distance(t, x, y) == dist[x, y], (x, y)


def test_leaf_parent_and_sibling_distances():
    t = LowerBoundTree(2, 3, 2, seed=9)
    leaf = t.n_internal
    parent = t.id_of_label[t.leaf_words[0]]
    assert lb_tree_distance(t, leaf, parent) == 1
    sibling = next(
        t.n_internal + i
        for i, w in enumerate(t.leaf_words)
        if i != 0 and w == t.leaf_words[0]
    )
    assert lb_tree_distance(t, leaf, sibling) == 2


def test_word_query_round_trip():
    for c, delta, k in [(2, 4, 1), (1, 3, 3)]:
        t = LowerBoundTree(c, delta, k, seed=7)
        dist = all_pairs_distances(t.graph)
        oracle = t.word_oracle()
        rng = random.Random(0)
        pairs = 0
        while pairs < 10**4:
            x = rng.randrange(t.n_nodes)
            y = rng.randrange(t.n_nodes)
            if not (t.is_leaf(x) or t.is_leaf(y)) or x == y:
                continue
            kind, args, rebuild = distance_query_as_word_query(t, x, y)
            ans = (
                oracle.query_type1(*args) if kind == 1 else oracle.query_type2(*args)
            )
            assert rebuild(ans) == dist[x, y], (x, y)
            pairs += 1


def test_internal_internal_rejected():
    t = LowerBoundTree(1, 3, 2, seed=1)
    with pytest.raises(ValueError):
        distance_query_as_word_query(t, 0, 1)


def test_reduction_chain_distance_word_coordinate():
    # distance query -> word query -> coordinate simulation, exact accounting
    t = LowerBoundTree(1, 3, 3, seed=21)
    dist = all_pairs_distances(t.graph)
    co = t.coordinate_oracle()
    wo = t.word_oracle()
    rng = random.Random(4)
    word_queries = 0
    for _ in range(10**4):
        x = rng.randrange(t.n_nodes)
        y = rng.randrange(t.n_nodes)
        if not (t.is_leaf(x) or t.is_leaf(y)) or x == y:
            continue
        kind, args, rebuild = distance_query_as_word_query(t, x, y)
        expect = (
            wo.query_type1(*args) if kind == 1 else wo.query_type2(*args)
        )
        ans, nos = word_query_via_coordinates(co, kind, *args)
        word_queries += 1
        assert ans == expect
        assert rebuild(ans) == dist[x, y]
        assert nos == (1 if ans < t.k else 0)
    assert co.no_count <= word_queries


def test_balanced_function_word_recovery():
    for delta, k, c, seed in [(2, 1, 1, 0), (4, 3, 1, 1), (3, 2, 2, 2)]:
        f = random_balanced_function(delta, k, c, seed)
        n = f.shape[0]
        oracle = WordOracle(f, delta)
        report = reconstruct_balanced_function(oracle, n, delta, k, c)
        assert np.array_equal(report.func, f)
        assert report.queries <= n * k * delta
        # output is balanced
        words, counts = np.unique(report.func, axis=0, return_counts=True)
        assert (counts == c).all() and len(words) == delta**k


def test_balanced_function_tiny_case_query_budget():
    f = random_balanced_function(2, 1, 1, seed=3)
    oracle = WordOracle(f, 2)
    report = reconstruct_balanced_function(oracle, 2, 2, 1, 1)
    assert np.array_equal(report.func, f)
    assert report.queries <= 4


def test_balanced_function_coordinate_recovery_no_count():
    delta, k, c = 4, 3, 1
    f = random_balanced_function(delta, k, c, seed=9)
    n = f.shape[0]
    oracle = CoordinateOracle(f, delta)
    report = reconstruct_balanced_function(oracle, n, delta, k, c)
    assert np.array_equal(report.func, f)
    assert report.no_answers == oracle.no_count
    assert report.no_answers <= report.queries


def test_word_vs_coordinate_accounting_agree():
    # same strategy on both oracle flavours: word-query count bounds the
    # coordinate NO-count on identical hidden functions
    delta, k, c = 3, 3, 2
    f = random_balanced_function(delta, k, c, seed=13)
    n = f.shape[0]
    wo = WordOracle(f, delta)
    rep_w = reconstruct_balanced_function(wo, n, delta, k, c)
    co = CoordinateOracle(f, delta)
    rep_c = reconstruct_balanced_function(co, n, delta, k, c)
    assert np.array_equal(rep_w.func, rep_c.func)
    assert rep_c.no_answers <= rep_w.queries


def test_phylo_recovery_small():
    t = LowerBoundTree(2, 2, 1, seed=11)
    dist = all_pairs_distances(t.graph)
    leaf_ids = [t.n_internal + i for i in range(t.n_leaves)]
    leaf_dist = dist[np.ix_(leaf_ids, leaf_ids)]
    # recover_leaf_labels indexes the matrix by leaf index
    oracle = t.distance_oracle()
    labels, used = recover_leaf_labels(t, leaf_dist, oracle)
    for i in range(t.n_leaves):
        assert labels[i] == t.leaf_words[i]
    assert used <= t.delta**2 * t.n_leaves


def test_phylo_recovery_depth0_zero_queries():
    t = LowerBoundTree(3, 4, 0, seed=2)
    oracle = t.distance_oracle()
    labels, used = recover_leaf_labels(
        t, np.zeros((t.n_leaves, t.n_leaves)), oracle
    )
    assert used == 0
    assert all(labels[i] == () for i in range(t.n_leaves))


@pytest.mark.parametrize("c,delta,k", [(1, 3, 2), (2, 4, 1), (1, 2, 5)])
def test_phylo_recovery_budget(c, delta, k):
    t = LowerBoundTree(c, delta, k, seed=5)
    dist = all_pairs_distances(t.graph)
    leaf_ids = [t.n_internal + i for i in range(t.n_leaves)]
    leaf_dist = dist[np.ix_(leaf_ids, leaf_ids)]
    oracle = t.distance_oracle()
    labels, used = recover_leaf_labels(t, leaf_dist, oracle)
    assert labels == {i: t.leaf_words[i] for i in range(t.n_leaves)}
    assert used <= delta**2 * t.n_leaves


def test_learn_partition_single_class():
    oracle = MembershipOracle([0] * 7)
    classes, used = learn_partition(oracle, 7, 1)
    assert used == 0
    assert classes == [list(range(7))]


def test_learn_partition_traced_example():
    oracle = MembershipOracle([0, 0, 1, 1])
    classes, used = learn_partition(oracle, 4, 2)
    assert used == 3
    assert classes == [[0, 1], [2, 3]]


def test_learn_partition_random_sweep():
    rng = random.Random(6)
    for _ in range(30):
        k = rng.randint(2, 8)
        n = rng.randint(k, 200)
        labels = [i % k for i in range(k)] + [
            rng.randrange(k) for _ in range(n - k)
        ]
        rng.shuffle(labels)
        oracle = MembershipOracle(labels)
        classes, used = learn_partition(oracle, n, k)
        got = {frozenset(c) for c in classes}
        want = {
            frozenset(i for i in range(n) if labels[i] == j) for j in range(k)
        }
        assert got == want
        assert used <= (k - 1) * n


def test_learn_partition_rejects_wrong_class_count():
    # fewer classes than promised is detectable; more than promised is not,
    # since the k-1-NO shortcut never discovers a (k+1)-th class
    oracle = MembershipOracle([0, 0, 0])
    with pytest.raises(ValueError):
        learn_partition(oracle, 3, 2)
