import itertools
import random

import numpy as np
import pytest

from distrecon.errors import GraphError
from distrecon.oracles import (
    CoordinateOracle,
    DistanceOracle,
    MembershipOracle,
    WordOracle,
    betweenness_query,
    word_query_via_coordinates,
)

from conftest import complete_graph, path_graph


def random_function(n, delta, k, seed):
    rng = np.random.default_rng(seed)
    return rng.integers(1, delta + 1, size=(n, k))


def test_distance_oracle_basics():
    g = path_graph(4)
    o = DistanceOracle.from_graph(g)
    assert o.query(1, 1) == 0
    assert o.query(0, 1) == 1
    assert o.query(0, 3) == 3
    assert o.count == 3
    with pytest.raises(GraphError):
        o.query(0, 4)


def test_counter_exactness_mixed_batches():
    g = path_graph(9)
    o = DistanceOracle.from_graph(g)
    o.query(0, 5)
    o.query_many(2, [0, 1, 3])
    o.query_block([0, 1], [4, 5, 6])
    o.query(8, 8)
    assert o.count == 1 + 3 + 6 + 1


def test_transcript_ring_and_dump(tmp_path):
    g = path_graph(3)
    o = DistanceOracle.from_graph(g, record_transcript=True)
    o.query(0, 2)
    o.query_many(1, [0, 2])
    path = tmp_path / "t.csv"
    o.dump_transcript(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "query_type,arg1,arg2,arg3,answer"
    assert lines[1] == "distance,0,2,,2"
    assert len(lines) == 4


def test_betweenness_adapter_path_and_triangle():
    g = path_graph(3)
    o = DistanceOracle.from_graph(g)
    assert betweenness_query(o, 0, 1, 2)
    assert o.count == 3
    assert betweenness_query(o, 0, 0, 2)  # d(u,u)=0 endpoint case
    k3 = complete_graph(3)
    o3 = DistanceOracle.from_graph(k3)
    for u, v, w in itertools.permutations(range(3), 3):
        assert betweenness_query(o3, u, v, w) == (v in (u, w))


def test_betweenness_memo_mode_reduces_count():
    g = path_graph(4)
    o = DistanceOracle.from_graph(g)
    memo = {}
    betweenness_query(o, 0, 1, 3, memo=memo)
    betweenness_query(o, 0, 2, 3, memo=memo)
    assert o.count == 5  # (0,3) reused


def test_coordinate_oracle_type1():
    f = np.array([[2, 1]])
    o = CoordinateOracle(f, delta=3)
    assert o.query_type1(0, 2, 0) is True
    assert o.no_count == 0
    assert o.query_type1(0, 3, 0) is False
    assert o.no_count == 1
    assert o.count == 2


def test_coordinate_oracle_exhaustive_no_count():
    n, delta, k = 12, 4, 3
    f = random_function(n, delta, k, seed=5)
    o = CoordinateOracle(f, delta)
    for a in range(n):
        for i in range(k):
            for b in range(1, delta + 1):
                o.query_type1(a, b, i)
    assert o.no_count == n * k * (delta - 1)


def test_coordinate_type2_reflexive_and_balanced_fraction():
    delta, k, c = 3, 2, 2
    words = list(itertools.product(range(1, delta + 1), repeat=k))
    n = c * len(words)
    f = np.array(words * c)
    o = CoordinateOracle(f, delta)
    for a in range(n):
        for i in range(k):
            assert o.query_type2(a, a, i) is True
    # exact same-symbol pair count per coordinate for the balanced layout
    for i in range(k):
        yes = sum(
            o.query_type2(a, b, i)
            for a in range(n)
            for b in range(n)
            if a != b
        )
        per_symbol = n // delta
        assert yes == delta * per_symbol * (per_symbol - 1)


def test_word_oracle_answers():
    f = np.array([[1, 2, 3], [1, 2, 3], [3, 1, 1]])
    o = WordOracle(f, delta=3)
    assert o.query_type1(0, (1, 2, 0)) == 2  # sentinel 0 never matches
    assert o.query_type2(0, 1) == 3
    assert o.query_type1(2, (1, 1, 1)) == 0


def test_word_oracle_rejects_bad_args():
    f = np.array([[1, 2]])
    o = WordOracle(f, delta=2)
    with pytest.raises(ValueError):
        o.query_type1(0, (1,))
    with pytest.raises(ValueError):
        o.query_type1(1, (1, 2))


def test_word_via_coordinates_identities():
    n, delta, k = 20, 4, 5
    f = random_function(n, delta, k, seed=9)
    wo = WordOracle(f, delta)
    co = CoordinateOracle(f, delta)
    rng = random.Random(3)
    word_queries = 0
    for _ in range(10**4):
        if rng.random() < 0.5:
            a = rng.randrange(n)
            word = tuple(rng.randint(1, delta) for _ in range(k))
            expect = wo.query_type1(a, word)
            ans, nos = word_query_via_coordinates(co, 1, a, word)
        else:
            a, a2 = rng.randrange(n), rng.randrange(n)
            expect = wo.query_type2(a, a2)
            ans, nos = word_query_via_coordinates(co, 2, a, a2)
        word_queries += 1
        assert ans == expect
        assert nos == (1 if ans < k else 0)
    assert co.no_count <= word_queries


def test_membership_oracle():
    o = MembershipOracle([0, 0, 1, 1])
    assert o.query(0, 1) is True
    assert o.query(0, 2) is False
    assert o.count == 2


def test_oracles_do_not_leak_ground_truth():
    g = path_graph(3)
    o = DistanceOracle.from_graph(g)
    public = [a for a in dir(o) if not a.startswith("_") and not callable(getattr(o, a))]
    assert set(public) == {"n", "count", "transcript"}
