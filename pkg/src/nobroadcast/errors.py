"""Exception types raised by the toolkit.

Malformed-input errors derive from ``ValueError`` and numerical failures
from ``ArithmeticError`` so callers can catch them by family.
"""


class NobroadcastError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(NobroadcastError, ValueError):
    pass


class NotPositive(NobroadcastError, ValueError):
    pass


class TraceNotOne(NobroadcastError, ValueError):
    pass


class ShapeMismatch(NobroadcastError, ValueError):
    pass


class InvalidRank(NobroadcastError, ValueError):
    pass


class InvalidPovm(NobroadcastError, ValueError):
    pass


class InvalidConfig(NobroadcastError, ValueError):
    pass


class NotCommuting(NobroadcastError, ValueError):
    """The two states do not commute, so no broadcasting channel exists."""

    def __init__(self, message, commutator_norm=None):
        super().__init__(message)
        self.commutator_norm = commutator_norm


class ConvergenceFailure(NobroadcastError, ArithmeticError):
    pass


class NotTracePreserving(NobroadcastError, ArithmeticError):
    pass
