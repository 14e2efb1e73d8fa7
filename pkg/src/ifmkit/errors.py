"""Exception types shared across the package."""


class IfmError(Exception):
    """Base class for all errors raised by ifmkit."""


class UnitRangeError(IfmError, ValueError):
    """A value that must lie in the closed unit interval does not."""


class DomainError(IfmError, ValueError):
    """An operand is outside its admissible domain (points, times, metrics)."""


class PreconditionError(IfmError):
    """A documented precondition of an operation was not met by the caller."""


class NonConvergenceError(IfmError):
    """No seed produced a convergent orbit within the iteration budget.

    Carries the per-seed traces so callers can diagnose what happened.
    """

    def __init__(self, message, traces):
        super().__init__(message)
        self.traces = list(traces)


class WitnessIntegrityError(IfmError):
    """A witness handed to the minimizer does not reproduce its violation.

    This signals a nondeterministic space function (or a stale witness),
    both of which make shrinking meaningless.
    """


class ConfigError(IfmError, ValueError):
    """A run configuration failed validation; `field` names the bad entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
