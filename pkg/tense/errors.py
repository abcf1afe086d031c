class TenseError(Exception):
    """Base class for errors raised by tense."""


class ConfigError(TenseError, ValueError):
    """Configuration names or values that cannot be resolved."""


class DomainError(TenseError, ValueError):
    """A point lies outside the domain box it is evaluated on."""


class NumericalError(TenseError, ArithmeticError):
    """A numerical procedure failed to produce a usable result."""


class FactorizationError(NumericalError):
    """Cholesky factorization failed, also after nugget escalation."""


class JitterExhaustedError(NumericalError):
    """Sampling covariance stayed indefinite up to the maximum jitter."""


class VarianceClampWarning(UserWarning):
    """Adjusted variances were clamped at zero on a noticeable share of points."""
