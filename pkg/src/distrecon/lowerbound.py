"""Executable laboratory for the query-lower-bound constructions.

Builds the fixed-internal-label tree whose hidden leaf placement encodes a
balanced function, exposes its closed-form distances and the translation of
distance queries into longest-common-prefix (word) queries, and carries the
reference reconstruction strategies whose costs the lab measures: balanced
function recovery, leaf-label recovery from a leaf-distance matrix, and
partition learning from membership queries.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .oracles import CoordinateOracle, DistanceOracle, MembershipOracle, WordOracle


class LowerBoundTree:
    """Rooted tree with fixed internal labels and hidden leaf placement.

    Internal nodes at depth below ``k`` have exactly ``delta`` children,
    labelled by extending the parent's word; depth-k internals have ``c``
    leaf children each. Which leaf hangs under which depth-k label is a
    seeded uniform permutation, hidden from query strategies.
    """

    def __init__(self, c: int, delta: int, k: int, seed: int = 0):
        if not 1 <= c <= delta:
            raise ValueError("need 1 <= c <= delta")
        if k < 0:
            raise ValueError("k must be >= 0")
        self.c = c
        self.delta = delta
        self.k = k
        self.seed = seed

        labels = [()]
        for depth in range(1, k + 1):
            labels.extend(itertools.product(range(1, delta + 1), repeat=depth))
        self.internal_labels = labels
        self.id_of_label = {lab: i for i, lab in enumerate(labels)}
        self.n_internal = len(labels)
        self.n_leaves = c * delta**k
        self.n_nodes = self.n_internal + self.n_leaves

        rng = random.Random(seed)
        words = [lab for lab in labels if len(lab) == k] * c
        rng.shuffle(words)
        # leaf i (node id n_internal + i) hangs under parent with label words[i]
        self.leaf_words = words

        edges = []
        for lab, i in self.id_of_label.items():
            if len(lab) < k:
                for s in range(1, delta + 1):
                    edges.append((i, self.id_of_label[lab + (s,)]))
        for i, w in enumerate(words):
            edges.append((self.id_of_label[w], self.n_internal + i))
        self.graph = Graph(self.n_nodes, edges)

    def is_leaf(self, node: int) -> bool:
        return node >= self.n_internal

    def leaf_index(self, node: int) -> int:
        return node - self.n_internal

    def label_of_internal(self, node: int) -> tuple[int, ...]:
        return self.internal_labels[node]

    def children_of_internal(self, node: int) -> list[int]:
        lab = self.internal_labels[node]
        if len(lab) < self.k:
            return [self.id_of_label[lab + (s,)] for s in range(1, self.delta + 1)]
        return [
            self.n_internal + i
            for i, w in enumerate(self.leaf_words)
            if w == lab
        ]

    def hidden_function(self) -> np.ndarray:
        """The leaf-to-word assignment as an (n_leaves x k) array."""
        if self.k == 0:
            return np.zeros((self.n_leaves, 0), dtype=np.int64)
        return np.array(self.leaf_words, dtype=np.int64)

    def word_oracle(self, record_transcript: bool = False) -> WordOracle:
        return WordOracle(self.hidden_function(), self.delta, record_transcript)

    def coordinate_oracle(self, record_transcript: bool = False) -> CoordinateOracle:
        return CoordinateOracle(self.hidden_function(), self.delta, record_transcript)

    def distance_oracle(self) -> DistanceOracle:
        return DistanceOracle.from_graph(self.graph)


def _lcp(a, b) -> int:
    i = 0
    for x, y in zip(a, b):
        if x != y:
            break
        i += 1
    return i


def lb_tree_distance(t: LowerBoundTree, x: int, y: int) -> int:
    """Closed-form distance between any two nodes of the tree."""
    if x == y:
        return 0
    k = t.k
    if t.is_leaf(x) and t.is_leaf(y):
        i = _lcp(t.leaf_words[t.leaf_index(x)], t.leaf_words[t.leaf_index(y)])
        return 2 * (1 + (k - i))
    if t.is_leaf(x) or t.is_leaf(y):
        leaf, internal = (x, y) if t.is_leaf(x) else (y, x)
        word = t.leaf_words[t.leaf_index(leaf)]
        lab = t.internal_labels[internal]
        i = _lcp(word, lab)
        j = len(lab)
        return 1 + (k - i) + (j - i)
    la, lb_ = t.internal_labels[x], t.internal_labels[y]
    i = _lcp(la, lb_)
    return (len(la) - i) + (len(lb_) - i)


def distance_query_as_word_query(t: LowerBoundTree, x: int, y: int):
    """Translate a distance query into the equivalent word-oracle query.

    Returns (kind, args, rebuild) where kind is 1 or 2, args feed the word
    oracle, and rebuild maps the oracle's answer back to the distance.
    Internal-internal pairs carry no hidden information and raise ValueError.
    """
    k = t.k
    if not t.is_leaf(x) and not t.is_leaf(y):
        raise ValueError("internal-internal distances are fixed; no information")
    if x == y:
        return 2, (t.leaf_index(x), t.leaf_index(y)), lambda i: 0
    if t.is_leaf(x) and t.is_leaf(y):
        return (
            2,
            (t.leaf_index(x), t.leaf_index(y)),
            lambda i: 2 * (1 + (k - i)),
        )
    leaf, internal = (x, y) if t.is_leaf(x) else (y, x)
    lab = t.internal_labels[internal]
    j = len(lab)
    padded = tuple(lab) + (0,) * (k - j)
    return (
        1,
        (t.leaf_index(leaf), padded),
        lambda i: 1 + (k - i) + (j - i),
    )


@dataclass
class BalancedRecoveryReport:
    func: np.ndarray
    queries: int
    no_answers: int | None


def random_balanced_function(delta: int, k: int, c: int, seed: int) -> np.ndarray:
    """Uniformly shuffled function [n] -> [delta]^k with every preimage of size c."""
    words = list(itertools.product(range(1, delta + 1), repeat=k)) * c
    rng = random.Random(seed)
    rng.shuffle(words)
    return np.array(words, dtype=np.int64).reshape(len(words), k)


def reconstruct_balanced_function(
    oracle, n: int, delta: int, k: int, c: int
) -> BalancedRecoveryReport:
    """Recover a hidden balanced function by per-element prefix descent.

    Works against either oracle flavour. Saturated prefixes (whose quota of
    c * delta^(k-len) preimages is exhausted) are skipped, and the last open
    symbol of a coordinate is deduced without a query.
    """
    start = oracle.count
    prefix_used: dict[tuple[int, ...], int] = {}
    func = np.zeros((n, k), dtype=np.int64)
    word_flavour = isinstance(oracle, WordOracle)

    def quota(prefix) -> int:
        return c * delta ** (k - len(prefix))

    for a in range(n):
        prefix: tuple[int, ...] = ()
        while len(prefix) < k:
            open_symbols = [
                s
                for s in range(1, delta + 1)
                if prefix_used.get(prefix + (s,), 0) < quota(prefix + (s,))
            ]
            if not open_symbols:
                raise ValueError("hidden function is not balanced")
            progressed = False
            for idx, s in enumerate(open_symbols):
                if idx == len(open_symbols) - 1:
                    prefix = prefix + (s,)
                    progressed = True
                    break
                if word_flavour:
                    probe = prefix + (s,) + (1,) * (k - len(prefix) - 1)
                    ans = oracle.query_type1(a, probe)
                    if ans > len(prefix):
                        prefix = probe[:ans]
                        progressed = True
                        break
                else:
                    if oracle.query_type1(a, s, len(prefix)):
                        prefix = prefix + (s,)
                        progressed = True
                        break
            if not progressed:
                raise ValueError("no symbol accepted; oracle inconsistent")
        func[a] = prefix
        for i in range(1, k + 1):
            key = prefix[:i]
            prefix_used[key] = prefix_used.get(key, 0) + 1
    return BalancedRecoveryReport(
        func=func,
        queries=oracle.count - start,
        no_answers=getattr(oracle, "no_count", None),
    )


def recover_leaf_labels(
    t: LowerBoundTree, leaf_dist: np.ndarray, oracle: DistanceOracle
) -> tuple[dict[int, tuple[int, ...]], int]:
    """Recover the hidden leaf words from the leaf-leaf distance matrix plus
    distance queries from class representatives to internal children.

    Leaf classes at each level come from the matrix alone (close pairs share
    the deeper ancestor); one representative per class is queried against the
    children of the current subtree root to match classes to branches.
    """
    start = oracle.count
    labels: dict[int, tuple[int, ...]] = {}

    def recurse(node: int, leaves: list[int]):
        lab = t.internal_labels[node]
        depth = len(lab)
        if depth == t.k:
            for leaf in leaves:
                labels[t.leaf_index(leaf)] = lab
            return
        h = t.k - depth
        classes: list[list[int]] = []
        for leaf in leaves:
            for cls in classes:
                if leaf_dist[t.leaf_index(leaf), t.leaf_index(cls[0])] <= 2 * h:
                    cls.append(leaf)
                    break
            else:
                classes.append([leaf])
        children = t.children_of_internal(node)
        for cls in classes:
            rep = min(cls)
            answers = oracle.query_many(rep, children)
            matches = [ch for ch, d in zip(children, answers.tolist()) if d == h]
            if len(matches) != 1:
                raise ValueError("leaf matrix inconsistent with the tree")
            recurse(matches[0], cls)

    recurse(0, [t.n_internal + i for i in range(t.n_leaves)])
    return labels, oracle.count - start


def learn_partition(
    oracle: MembershipOracle, n: int, k: int
) -> tuple[list[list[int]], int]:
    """Learn a hidden k-class partition with same-class queries.

    Maintains one representative per discovered class; each element is tested
    against representatives in discovery order, stopping at a YES, and once k
    classes are known the last NO is never asked (k-1 NOs pin the class).
    """
    start = oracle.count
    classes: list[list[int]] = []
    for a in range(n):
        placed = False
        for idx, cls in enumerate(classes):
            if len(classes) == k and idx == len(classes) - 1:
                cls.append(a)  # k-1 NOs already heard
                placed = True
                break
            if oracle.query(a, cls[0]):
                cls.append(a)
                placed = True
                break
        if not placed:
            classes.append([a])
            if len(classes) > k:
                raise ValueError("more than k classes discovered")
    if len(classes) != k:
        raise ValueError(
            f"discovered {len(classes)} classes, promised {k}"
        )
    return classes, oracle.count - start
