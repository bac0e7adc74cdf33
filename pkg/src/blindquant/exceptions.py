"""Exception hierarchy.

Domain errors are ``ValueError`` subclasses so they compose with the usual
argument-checking idiom; numerical failures derive from ``NumericalError``
and map to a dedicated CLI exit code.
"""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(RuntimeError):
    """A numerical procedure could not certify its result."""


class TruncationError(NumericalError):
    """A folded-series truncation could not certify the requested tail mass."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


class UnfoldingError(NumericalError):
    """Folded samples could not be unfolded consistently."""
