"""Exception types shared across the package."""


class HypermatchError(Exception):
    """Base class for errors raised by this package."""


class InvalidQueryError(HypermatchError, ValueError):
    """A query violates an operation's parameter ranges (bad l, vertex out of range, ...)."""


class PreconditionError(HypermatchError, ValueError):
    """A documented precondition of an operation was violated by the caller."""


class InfeasibleAugmentationError(HypermatchError, ValueError):
    """Requested clique augmentation is infeasible (m too large for n, k, eta)."""


class SamplingExhaustedError(HypermatchError, RuntimeError):
    """A rejection sampler ran out of tries before meeting its condition."""


class BudgetExceededError(HypermatchError, RuntimeError):
    """A branch-and-bound search exceeded its node budget."""

    def __init__(self, message: str, nodes: int):
        super().__init__(message)
        self.nodes = nodes


class StepFailureError(HypermatchError, RuntimeError):
    """A constructive pipeline step could not be completed; carries the trace so far."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class InternalContradictionError(HypermatchError, RuntimeError):
    """A certified-true assertion failed on inputs meeting all preconditions.

    This indicates a bug in the implementation, never a property of the input.
    """

    def __init__(self, message: str, check: str = "", trace=None):
        super().__init__(message)
        self.check = check
        self.trace = trace
