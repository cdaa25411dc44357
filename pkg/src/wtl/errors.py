"""Exception hierarchy shared by all modules."""


class WTLError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WTLError, ValueError):
    """A parameter lies outside the range where a bound or definition applies."""


class TruncationError(WTLError):
    """A stored sequence is too short to answer without extrapolating."""


class EnumerationRangeError(WTLError):
    """Requested more tensor eigenvalues than can be enumerated."""


class DivergenceError(WTLError):
    """A tail sum did not settle within its term budget."""


class SingularDesignError(WTLError):
    """The weighted least-squares design matrix does not have full column rank."""

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class SamplingError(WTLError):
    """Rejection sampling ran out of its iteration budget."""


class FitError(WTLError):
    """Regression design is degenerate."""


class UnsupportedError(WTLError):
    """A valid request the implementation deliberately does not serve."""
