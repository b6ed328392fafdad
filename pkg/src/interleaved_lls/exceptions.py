"""Exception types raised by the library."""


class DimensionMismatchError(ValueError):
    """Shapes of targets, features, or parameter vectors do not agree."""


class EmptyInputError(ValueError):
    """An operation that needs at least one data block received none."""


class InvalidScheduleError(ValueError):
    """An interleaving schedule was requested for an odd number of steps."""


class SingularSystemError(RuntimeError):
    """A normal-equations system is singular or not positive definite."""


class SingularUpdateError(RuntimeError):
    """The accumulated Gram matrix became singular during a recursion step.

    The 1-based index of the offending step is available as ``step``.
    """

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"singular Gram matrix at recursion step {step}")


class EstimationFailedError(RuntimeError):
    """No candidate in a grid search produced a usable estimate."""


class MonteCarloAbortError(RuntimeError):
    """Too many Monte Carlo iterations failed for the aggregates to be trusted."""
