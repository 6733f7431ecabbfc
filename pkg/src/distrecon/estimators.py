"""Estimator-style wrappers around the reconstruction algorithms.

Each reconstructor follows the familiar fit/attributes idiom: parameters in
the constructor, ``fit(oracle)`` runs the algorithm against a counting
distance oracle, and the recovered structure lands in trailing-underscore
attributes. ``get_params``/``set_params`` come from scikit-learn's base
class, so instances clone and grid over parameter settings like any other
estimator.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from .chordal import reconstruct_chordal
from .kchordal import reconstruct_kchordal
from .oracles import DistanceOracle
from .result import ReconstructionResult
from .tree import reconstruct_tree
from .treelength import reconstruct_treelength


def _check_oracle(oracle, n):
    if not hasattr(oracle, "query_many") or not hasattr(oracle, "count"):
        raise TypeError("fit expects a counting distance oracle")
    if n is None:
        n = oracle.n
    if n != oracle.n:
        raise ValueError(f"n={n} disagrees with the oracle's vertex set {oracle.n}")
    return n


class BaseReconstructor(BaseEstimator):
    """Shared fit bookkeeping; subclasses implement ``_run``."""

    def fit(self, oracle: DistanceOracle, n: int | None = None):
        n = _check_oracle(oracle, n)
        result: ReconstructionResult = self._run(oracle, n)
        self.result_ = result
        self.edges_ = result.edges
        self.n_ = n
        self.query_count_ = result.queries
        return self

    def predict_edges(self):
        """The recovered edge set (fit must have run)."""
        if not hasattr(self, "edges_"):
            raise AttributeError("call fit before predict_edges")
        return set(self.edges_)


class TreeReconstructor(BaseReconstructor):
    """Exact tree reconstruction by centroid-separator descent."""

    def __init__(self, order: str = "deterministic", seed: int | None = None,
                 collect_trace: bool = False):
        self.order = order
        self.seed = seed
        self.collect_trace = collect_trace

    def _run(self, oracle, n):
        return reconstruct_tree(
            oracle, n, order=self.order, seed=self.seed,
            collect_trace=self.collect_trace,
        )


class ChordalReconstructor(BaseReconstructor):
    """Exact chordal reconstruction by clique-separator descent."""

    def __init__(self, delta: int | None = None, collect_stats: bool = False):
        self.delta = delta
        self.collect_stats = collect_stats

    def _run(self, oracle, n):
        return reconstruct_chordal(
            oracle, n, delta=self.delta, collect_stats=self.collect_stats
        )


class KChordalReconstructor(BaseReconstructor):
    """Exact reconstruction for graphs without induced cycles longer than k."""

    def __init__(self, k: int = 3, delta: int = 3,
                 brute_threshold: int | None = None,
                 collect_stats: bool = False):
        self.k = k
        self.delta = delta
        self.brute_threshold = brute_threshold
        self.collect_stats = collect_stats

    def _run(self, oracle, n):
        return reconstruct_kchordal(
            oracle, n, k=self.k, delta=self.delta,
            brute_threshold=self.brute_threshold,
            collect_stats=self.collect_stats,
        )


class TreelengthReconstructor(BaseReconstructor):
    """Las Vegas reconstruction for graphs of bounded treelength."""

    def __init__(self, k: int = 1, delta: int = 3, seed: int | None = None,
                 retry_cap: int = 64):
        self.k = k
        self.delta = delta
        self.seed = seed
        self.retry_cap = retry_cap

    def _run(self, oracle, n):
        return reconstruct_treelength(
            oracle, n, k=self.k, delta=self.delta, seed=self.seed,
            retry_cap=self.retry_cap,
        )
