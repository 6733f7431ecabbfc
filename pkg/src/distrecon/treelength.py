"""Randomized reconstruction of graphs whose tree decompositions have
bounded-diameter bags.

Recursion on vertex areas: sample pairs to estimate which vertex lies on
many shortest paths, take the ball around the best candidate as a separator,
compute the component partition of the area minus the separator from
distance comparisons, verify the split is balanced (resampling otherwise,
Las Vegas style), then recurse per component. Each frame carries rings of
vertices at exact distances 1..3k from its area so that all shortest paths
between area vertices stay inside known territory; ring distances for child
frames are derived, not re-queried.

Every queried or exactly-derived distance lands in a run-global table and is
never asked twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalInvariantError, RetryLimitExceeded
from .oracles import DistanceOracle
from .result import ReconstructionResult


def balance_fraction(delta: int, k: int) -> float:
    """Component-size fraction the separator check enforces."""
    return math.sqrt(1.0 - 1.0 / (4.0 * (delta**k + 1)))


def betweenness_floor(delta: int, k: int) -> float:
    """Guaranteed maximum betweenness over the area and its k-rings."""
    return 1.0 / (2.0 * (delta**k + 1))


def sample_budget(delta: int, k: int, population: int) -> int:
    """Number of sampled pairs: C * ceil(log2(population)), C = delta^k + 1."""
    c = delta**k + 1
    return c * max(1, math.ceil(math.log2(max(population, 2))))


def exact_betweenness(dist: np.ndarray, area, v: int) -> float:
    """Fraction of unordered distinct pairs of ``area`` with some shortest
    path through v; the brute-force oracle used to validate the estimator."""
    area = np.asarray(sorted(area))
    m = area.size
    if m < 2:
        return 0.0
    da = dist[v, area]
    through = da[:, None] + da[None, :] == dist[np.ix_(area, area)]
    hits = (np.triu(through, 1)).sum()
    return float(hits) / (m * (m - 1) / 2)


class _Session:
    """Run-wide state: the counting oracle plus the known-distance table."""

    def __init__(self, oracle: DistanceOracle, n: int, k: int, delta: int,
                 seed: int | None):
        self.oracle = oracle
        self.n = n
        self.k = k
        self.delta = delta
        self.rng = np.random.default_rng(seed)
        self.known = np.full((n, n), -1, dtype=np.int32)
        np.fill_diagonal(self.known, 0)
        self.episodes: list[int] = []
        self.partition_checks: list[tuple[int, int]] = []
        self.ring_growth_ok = True
        self.phase = {"estimate": 0, "ball": 0, "partition": 0, "batch": 0,
                      "brute": 0}

    def row(self, u: int, cols: np.ndarray, phase: str) -> np.ndarray:
        vals = self.known[u, cols]
        missing = cols[vals < 0]
        if missing.size:
            fresh = self.oracle.query_many(u, missing)
            self.phase[phase] += int(missing.size)
            self.known[u, missing] = fresh
            self.known[missing, u] = fresh
        return self.known[u, cols]

    def block(self, rows, cols: np.ndarray, phase: str) -> None:
        for u in rows:
            self.row(int(u), cols, phase)


@dataclass
class RecursionFrame:
    """One recursion area plus its exact-distance rings."""

    session: _Session
    area: np.ndarray  # sorted vertex ids, G[area] connected
    rings: list[np.ndarray] = field(default_factory=list)  # R^1..R^{3k}

    @property
    def n_area(self) -> int:
        return int(self.area.size)

    @property
    def ring_union(self) -> np.ndarray:
        if not self.rings:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(self.rings)

    def ring_prefix(self, depth: int) -> np.ndarray:
        take = self.rings[:depth]
        if not take:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(take)


def estimate_high_betweenness(frame: RecursionFrame) -> int:
    """Vertex of (empirically) highest betweenness near the area.

    Samples distinct pairs from the area with replacement, queries both
    endpoints against the area-plus-inner-rings region, and returns the
    argmax of shortest-path membership counts (ties to the smallest id).
    """
    ses = frame.session
    k = ses.k
    region = np.concatenate([frame.area, frame.ring_prefix(math.ceil(1.5 * k))])
    region = np.sort(region)
    n_a = frame.n_area
    if n_a < 6:
        raise ValueError("estimator needs an area of at least 6 vertices")
    m = sample_budget(ses.delta, k, n_a + frame.ring_union.size)
    us = ses.rng.integers(0, n_a, size=m)
    vs = ses.rng.integers(0, n_a - 1, size=m)
    vs = vs + (vs >= us)
    counts = np.zeros(region.size, dtype=np.int64)
    pos = {int(v): i for i, v in enumerate(region)}
    for a, b in zip(frame.area[us], frame.area[vs]):
        da = ses.row(int(a), region, "estimate")
        db = ses.row(int(b), region, "estimate")
        dab = da[pos[int(b)]]
        counts += (da + db) == dab
    return int(region[int(np.argmax(counts))])


def ball_separator(frame: RecursionFrame, z: int) -> np.ndarray:
    """The closed ceil(3k/2)-ball around z, within the known territory."""
    ses = frame.session
    territory = np.sort(np.concatenate([frame.area, frame.ring_union]))
    dz = ses.row(z, territory, "ball")
    radius = math.ceil(1.5 * ses.k)
    return territory[dz <= radius]


def partition_components(
    frame: RecursionFrame, separator: np.ndarray
) -> tuple[list[np.ndarray], int]:
    """Partition of area minus separator into connected components.

    Uses only distance comparisons: a vertex joins the seed it can reach at
    least as fast as anything in the separator-plus-first-ring barrier, and
    overlapping seed sets merge. Returns (blocks, fresh_queries).
    """
    ses = frame.session
    before = ses.oracle.count
    ring1 = frame.rings[0] if frame.rings else np.empty(0, dtype=np.int64)
    barrier = np.sort(np.concatenate([separator, ring1]))
    sep_set = set(separator.tolist())
    rest = np.array([v for v in frame.area if v not in sep_set], dtype=np.int64)
    if rest.size == 0:
        return [], 0
    ses.block(rest, barrier, "partition")
    dbar = ses.known[np.ix_(rest, barrier)]
    if (dbar < 0).any():
        raise InternalInvariantError("barrier distances incomplete")
    dmin = dbar.min(axis=1)
    seeds = rest[dmin == 1]
    if seeds.size == 0:
        raise InternalInvariantError("no seed vertex adjacent to the barrier")
    ses.block(rest, seeds, "partition")
    member = ses.known[np.ix_(rest, seeds)] <= dmin[:, None]
    if not member.any(axis=1).all():
        raise InternalInvariantError("vertex without a reachable seed")
    # merge seeds that share members
    parent = list(range(seeds.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in member:
        idx = np.flatnonzero(row)
        a = find(int(idx[0]))
        for b in idx[1:]:
            rb = find(int(b))
            if rb != a:
                parent[rb] = a
                a = find(a)
    blocks: dict[int, list[int]] = {}
    first = member.argmax(axis=1)
    for v, col in zip(rest.tolist(), first.tolist()):
        blocks.setdefault(find(int(col)), []).append(v)
    out = [np.array(sorted(b), dtype=np.int64) for b in blocks.values()]
    out.sort(key=lambda arr: int(arr[0]))
    return out, ses.oracle.count - before


def spawn_subframes(
    frame: RecursionFrame,
    separator: np.ndarray,
    blocks: list[np.ndarray],
) -> list[RecursionFrame]:
    """Child frames with exact rings, derived from recorded distances only.

    The final area-wide batch (separator and rings against the area) must
    already be recorded. New ring entries for a child are computed through
    the barrier its paths must cross: the separator plus first ring for
    in-area vertices, the first ring alone for outside ones.
    """
    ses = frame.session
    k = ses.k
    known = ses.known
    ring1 = frame.rings[0] if frame.rings else np.empty(0, dtype=np.int64)
    ring_all = frame.ring_union
    barrier = np.sort(np.concatenate([separator, ring1]))
    area_set = set(frame.area.tolist())
    sep_in_area = np.array(sorted(set(separator.tolist()) & area_set),
                           dtype=np.int64)
    outside = np.array(sorted(set(ring_all.tolist()) - area_set), dtype=np.int64)

    # derive separator-to-outside distances through the first ring, so child
    # frames inherit complete first-ring rows
    if sep_in_area.size and outside.size:
        if ring1.size == 0:
            raise InternalInvariantError("outside vertices without a first ring")
        via = known[np.ix_(sep_in_area, ring1)][:, :, None] + known[
            np.ix_(ring1, outside)
        ][None, :, :]
        derived = via.min(axis=1).astype(known.dtype)
        cur = known[np.ix_(sep_in_area, outside)]
        stale = cur < 0
        if stale.any():
            rows = np.repeat(sep_in_area, outside.size).reshape(
                sep_in_area.size, outside.size
            )
            cols = np.tile(outside, (sep_in_area.size, 1))
            known[rows[stale], cols[stale]] = derived[stale]
            known[cols[stale], rows[stale]] = derived[stale]

    children = []
    growth_cap = (ses.delta + 1) ** math.ceil(4.5 * k)
    for block in blocks:
        block_set = set(block.tolist())
        in_area_out = np.array(
            sorted(area_set - block_set), dtype=np.int64
        )
        d_barrier_block = known[np.ix_(barrier, block)]
        if (d_barrier_block < 0).any():
            raise InternalInvariantError("missing barrier-to-block distances")
        nearest = d_barrier_block.min(axis=1)
        rings: list[list[int]] = [[] for _ in range(3 * k)]
        if in_area_out.size:
            d1 = known[np.ix_(barrier, in_area_out)]
            if (d1 < 0).any():
                raise InternalInvariantError("missing barrier-to-area distances")
            dv = (nearest[:, None] + d1).min(axis=0)
            for v, d in zip(in_area_out.tolist(), dv.tolist()):
                if 1 <= d <= 3 * k:
                    rings[d - 1].append(v)
        if outside.size:
            if ring1.size == 0:
                raise InternalInvariantError("outside vertices without a first ring")
            near1 = known[np.ix_(ring1, block)].min(axis=1)
            d2 = known[np.ix_(ring1, outside)]
            if (d2 < 0).any():
                raise InternalInvariantError("missing ring-to-outside distances")
            dv = (near1[:, None] + d2).min(axis=0)
            for v, d in zip(outside.tolist(), dv.tolist()):
                if 1 <= d <= 3 * k:
                    rings[d - 1].append(v)
        child = RecursionFrame(
            session=ses,
            area=block,
            rings=[np.array(sorted(rr), dtype=np.int64) for rr in rings],
        )
        if child.ring_union.size > ring_all.size + growth_cap:
            ses.ring_growth_ok = False
        children.append(child)
    return children


def _brute_force(frame: RecursionFrame) -> set[tuple[int, int]]:
    ses = frame.session
    ses.block(frame.area, frame.area, "brute")
    sub = ses.known[np.ix_(frame.area, frame.area)]
    edges = set()
    ii, jj = np.nonzero(np.triu(sub == 1, 1))
    for a, b in zip(frame.area[ii].tolist(), frame.area[jj].tolist()):
        edges.add((a, b))
    return edges


def _reconstruct_frame(frame: RecursionFrame, bf_threshold: int,
                       retry_cap: int) -> set[tuple[int, int]]:
    ses = frame.session
    if frame.n_area <= bf_threshold:
        return _brute_force(frame)
    alpha = balance_fraction(ses.delta, ses.k)
    attempts = 0
    while True:
        attempts += 1
        if attempts > retry_cap:
            raise RetryLimitExceeded(
                f"no balanced separator after {retry_cap} attempts"
            )
        z = estimate_high_betweenness(frame)
        separator = ball_separator(frame, z)
        blocks, fresh = partition_components(frame, separator)
        bound = frame.n_area * ses.delta * (
            int(frame.ring_union.size) + int(separator.size)
        )
        ses.partition_checks.append((fresh, bound))
        largest = max((int(b.size) for b in blocks), default=0)
        if largest <= alpha * frame.n_area:
            break
    ses.episodes.append(attempts)

    territory = np.sort(np.concatenate([separator, frame.ring_union]))
    ses.block(np.unique(territory), frame.area, "batch")

    edges: set[tuple[int, int]] = set()
    area_set = set(frame.area.tolist())
    sep_in_area = np.array(sorted(set(separator.tolist()) & area_set),
                           dtype=np.int64)
    if sep_in_area.size:
        sub = ses.known[np.ix_(sep_in_area, frame.area)]
        ii, jj = np.nonzero(sub == 1)
        for a, b in zip(sep_in_area[ii].tolist(), frame.area[jj].tolist()):
            edges.add((a, b) if a < b else (b, a))

    for child in spawn_subframes(frame, separator, blocks):
        edges |= _reconstruct_frame(child, bf_threshold, retry_cap)
    return edges


def reconstruct_treelength(
    oracle: DistanceOracle,
    n: int,
    k: int,
    delta: int,
    seed: int | None = None,
    retry_cap: int = 64,
) -> ReconstructionResult:
    """Reconstruct a hidden graph of treelength at most k, degree at most delta.

    Las Vegas: the output is exact for every seed; randomness only affects the
    number of queries and separator retries.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    start = oracle.count
    ses = _Session(oracle, n, k, delta, seed)
    top = RecursionFrame(session=ses, area=np.arange(n, dtype=np.int64))
    bf_threshold = max(math.ceil(math.log2(max(n, 2))), 5)
    edges = _reconstruct_frame(top, bf_threshold, retry_cap)
    episodes = ses.episodes
    result = ReconstructionResult(
        algorithm="treelength",
        n=n,
        edges=edges,
        queries=oracle.count - start,
        phase_counts=dict(ses.phase),
        seed=seed,
        retries=sum(a - 1 for a in episodes),
    )
    result.details["episodes"] = episodes
    result.details["partition_checks"] = ses.partition_checks
    result.details["ring_growth_ok"] = ses.ring_growth_ok
    result.details["first_try_rate"] = (
        sum(1 for a in episodes if a == 1) / len(episodes) if episodes else 1.0
    )
    return result
