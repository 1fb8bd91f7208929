"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(ValueError):
    """An operation was called with inconsistent or unsupported options."""


class NumericError(ArithmeticError):
    """A quadrature failed to reach its tolerance within the allowed budget.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (levels tried, last estimates, error estimate).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
