"""Exception and warning types shared across qhorn."""


class QHornError(Exception):
    """Base class for all qhorn errors."""


class DomainError(QHornError, ValueError):
    """An input lies outside the region where an operation is defined.

    Raised for pole-margin violations, |q| outside (0, 1), arguments outside
    the convergence disk and similar conditions.
    """


class NumericOverflowError(QHornError, ArithmeticError):
    """A product or sum left the finite floating point range."""


class ConfigurationError(QHornError, ValueError):
    """Invalid sampler/policy configuration (e.g. sampler exhaustion)."""


class TruncationWarning(UserWarning):
    """A series did not meet its stopping rule within the term budget."""
