"""Exception types shared across the package."""


class GraphError(ValueError):
    """Malformed graph input (parse errors, self-loops, duplicates, disconnected)."""


class NotChordalError(ValueError):
    """A chordal graph was required but the input has a chordless 4+ cycle."""


class DecompositionError(ValueError):
    """A tree decomposition violates the subtree or edge-coverage property."""


class InfeasibleParameters(ValueError):
    """Generator parameters that no instance can satisfy."""


class WorkBudgetExceeded(RuntimeError):
    """An enumeration-based checker hit its configured step budget."""


class OracleInconsistencyError(RuntimeError):
    """Oracle answers that no graph in the promised class can produce."""


class InternalInvariantError(AssertionError):
    """A guaranteed structural invariant failed; indicates a bug, aborts loudly."""


class RetryLimitExceeded(RuntimeError):
    """A Las Vegas retry loop hit its safety cap without succeeding."""
