"""Reconstruction run results with exact query accounting."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ReconstructionResult:
    """Recovered edge set plus the exact query tally and per-phase breakdown."""

    algorithm: str
    n: int
    edges: set[tuple[int, int]]
    queries: int
    phase_counts: dict[str, int] = field(default_factory=dict)
    seed: int | None = None
    retries: int = 0
    details: dict = field(default_factory=dict)

    def matches(self, edges: set[tuple[int, int]]) -> bool:
        return self.edges == edges
