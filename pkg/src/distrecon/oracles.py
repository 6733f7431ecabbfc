"""Counting oracles over hidden ground truth.

Every query model used by the reconstruction algorithms and the lower-bound
lab lives here. An oracle hides its ground truth behind query methods and
keeps an exact tally: a batch over A x B always counts |A|*|B|. Transcripts
are off by default and ring-buffered so large benchmarks stay memory-safe.

One oracle instance is single-writer; benchmarks give each trial its own
oracle over a shared immutable graph.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

import numpy as np

from .errors import GraphError
from .graph import Graph, all_pairs_distances

TRANSCRIPT_CAPACITY = 10**6


class _TranscriptMixin:
    def _init_transcript(self, record: bool):
        self._transcript = deque(maxlen=TRANSCRIPT_CAPACITY) if record else None

    def _record(self, qtype, a1, a2, a3, answer):
        if self._transcript is not None:
            self._transcript.append((qtype, a1, a2, a3, answer))

    @property
    def transcript(self):
        return list(self._transcript) if self._transcript is not None else None

    def dump_transcript(self, path) -> None:
        """Write the transcript as CSV: query_type,arg1,arg2,arg3,answer."""
        if self._transcript is None:
            raise ValueError("transcript recording is disabled for this oracle")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("query_type,arg1,arg2,arg3,answer\n")
            for qtype, a1, a2, a3, answer in self._transcript:
                a3s = "" if a3 is None else a3
                fh.write(f"{qtype},{a1},{a2},{a3s},{answer}\n")


class DistanceOracle(_TranscriptMixin):
    """Answers exact hop distances of a hidden graph and counts every call."""

    def __init__(self, dist: np.ndarray, record_transcript: bool = False):
        self._dist = dist
        self.n = dist.shape[0]
        self.count = 0
        self._init_transcript(record_transcript)

    @classmethod
    def from_graph(cls, g: Graph, record_transcript: bool = False):
        return cls(all_pairs_distances(g), record_transcript)

    def _check(self, v: int):
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range [0,{self.n})")

    def query(self, u: int, v: int) -> int:
        self._check(u)
        self._check(v)
        self.count += 1
        d = int(self._dist[u, v])
        self._record("distance", u, v, None, d)
        return d

    def query_many(self, u: int, targets: Sequence[int]) -> np.ndarray:
        """Query(u, B): one row of answers, counted as |B| calls."""
        self._check(u)
        idx = np.asarray(targets, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise GraphError("target vertex out of range")
        self.count += int(idx.size)
        out = self._dist[u, idx]
        if self._transcript is not None:
            for v, d in zip(idx.tolist(), out.tolist()):
                self._record("distance", u, v, None, int(d))
        return out

    def query_block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Query(A, B): counted as |A|*|B| calls."""
        r = np.asarray(rows, dtype=np.int64)
        c = np.asarray(cols, dtype=np.int64)
        for idx in (r, c):
            if idx.size and (idx.min() < 0 or idx.max() >= self.n):
                raise GraphError("vertex out of range")
        self.count += int(r.size) * int(c.size)
        out = self._dist[np.ix_(r, c)]
        if self._transcript is not None:
            for i, u in enumerate(r.tolist()):
                for j, v in enumerate(c.tolist()):
                    self._record("distance", u, v, None, int(out[i, j]))
        return out


def betweenness_query(
    oracle: DistanceOracle, u: int, v: int, w: int, memo: dict | None = None
) -> bool:
    """Whether v lies on a shortest path between u and w.

    Realized by three distance queries; the literal reduction never
    deduplicates, so accounting matches three calls per use. Passing a dict
    enables a memoizing mode for experiments (cached pairs cost nothing).
    """
    def dist(a, b):
        if memo is None:
            return oracle.query(a, b)
        key = (a, b) if a <= b else (b, a)
        if key not in memo:
            memo[key] = oracle.query(a, b)
        return memo[key]

    return dist(u, v) + dist(v, w) == dist(u, w)


class CoordinateOracle(_TranscriptMixin):
    """Per-coordinate equality oracle over a hidden function [n] -> [delta]^k.

    Complexity is tracked in NO answers as well as total queries. Symbols are
    1..delta; symbol 0 is accepted as an always-mismatching sentinel so that
    padded-word simulations keep exact accounting.
    """

    def __init__(self, func: np.ndarray, delta: int, record_transcript: bool = False):
        func = np.asarray(func, dtype=np.int64)
        if func.ndim != 2:
            raise ValueError("hidden function must be an n x k array")
        if func.size and (func.min() < 1 or func.max() > delta):
            raise ValueError("hidden function symbols must lie in 1..delta")
        self._func = func
        self.n, self.k = func.shape
        self.delta = delta
        self.count = 0
        self.no_count = 0
        self._init_transcript(record_transcript)

    def _check_args(self, a: int, i: int):
        if not 0 <= a < self.n:
            raise ValueError(f"element {a} out of range")
        if not 0 <= i < self.k:
            raise ValueError(f"coordinate {i} out of range")

    def query_type1(self, a: int, symbol: int, i: int) -> bool:
        """Is f(a)_i = symbol?"""
        self._check_args(a, i)
        if not 0 <= symbol <= self.delta:
            raise ValueError(f"symbol {symbol} out of range")
        self.count += 1
        ans = bool(self._func[a, i] == symbol)
        if not ans:
            self.no_count += 1
        self._record("coord1", a, symbol, i, ans)
        return ans

    def query_type2(self, a: int, a2: int, i: int) -> bool:
        """Is f(a)_i = f(a2)_i?"""
        self._check_args(a, i)
        self._check_args(a2, i)
        self.count += 1
        ans = bool(self._func[a, i] == self._func[a2, i])
        if not ans:
            self.no_count += 1
        self._record("coord2", a, a2, i, ans)
        return ans


class WordOracle(_TranscriptMixin):
    """Longest-common-prefix oracle over a hidden function [n] -> [delta]^k."""

    def __init__(self, func: np.ndarray, delta: int, record_transcript: bool = False):
        func = np.asarray(func, dtype=np.int64)
        if func.ndim != 2:
            raise ValueError("hidden function must be an n x k array")
        self._func = func
        self.n, self.k = func.shape
        self.delta = delta
        self.count = 0
        self._init_transcript(record_transcript)

    def _lcp(self, word_a, word_b) -> int:
        i = 0
        for x, y in zip(word_a, word_b):
            if x != y:
                break
            i += 1
        return i

    def query_type1(self, a: int, word: Sequence[int]) -> int:
        """Largest i with f(a)[:i] == word[:i]; word entries in 0..delta."""
        if not 0 <= a < self.n:
            raise ValueError(f"element {a} out of range")
        if len(word) != self.k:
            raise ValueError(f"word must have length {self.k}")
        if any(not 0 <= s <= self.delta for s in word):
            raise ValueError("word symbols out of range")
        self.count += 1
        ans = self._lcp(self._func[a], word)
        self._record("word1", a, "".join(map(str, word)), None, ans)
        return ans

    def query_type2(self, a: int, a2: int) -> int:
        """Largest i with f(a)[:i] == f(a2)[:i]."""
        for x in (a, a2):
            if not 0 <= x < self.n:
                raise ValueError(f"element {x} out of range")
        self.count += 1
        ans = self._lcp(self._func[a], self._func[a2])
        self._record("word2", a, a2, None, ans)
        return ans


def word_query_via_coordinates(
    co: CoordinateOracle, qtype: int, a: int, arg
) -> tuple[int, int]:
    """Simulate one word-oracle query with coordinate queries.

    Returns (answer, no_answers_incurred). The simulation asks prefix checks
    until the first mismatch, so it incurs exactly one NO when the answer is
    below k and none when the full word matches.
    """
    k = co.k
    if qtype == 1:
        word = list(arg)
        if len(word) != k:
            raise ValueError(f"word must have length {k}")
        nos = 0
        for i in range(k):
            if not co.query_type1(a, word[i], i):
                return i, 1
        return k, nos
    if qtype == 2:
        for i in range(k):
            if not co.query_type2(a, arg, i):
                return i, 1
        return k, 0
    raise ValueError("qtype must be 1 or 2")


class MembershipOracle(_TranscriptMixin):
    """Same-class queries over a hidden partition of [n]."""

    def __init__(self, labels: Sequence[int], record_transcript: bool = False):
        self._labels = np.asarray(labels, dtype=np.int64)
        self.n = int(self._labels.size)
        self.count = 0
        self._init_transcript(record_transcript)

    def query(self, a: int, b: int) -> bool:
        for x in (a, b):
            if not 0 <= x < self.n:
                raise ValueError(f"element {x} out of range")
        self.count += 1
        ans = bool(self._labels[a] == self._labels[b])
        self._record("membership", a, b, None, ans)
        return ans
