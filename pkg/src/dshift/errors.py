"""Exception hierarchy shared by every module.

The CLI maps :class:`InputError` to exit code 2 and :class:`DomainError`
to exit code 3.
"""


class DShiftError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DShiftError, ValueError):
    """Malformed or invalid input (shapes, schema, preconditions)."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class RankError(InputError):
    """Functionals or generators are linearly dependent."""


class UnsupportedError(InputError):
    """Input is well formed but describes a case that is not handled."""


class DomainError(DShiftError, ArithmeticError):
    """A quantity is undefined or numerically degenerate at the given input."""


class PoleError(DomainError):
    """A rational kernel expression was evaluated at (or too near) a pole."""


class DegenerateError(InputError):
    """The input is a degenerate instance (e.g. a scalar matrix)."""


class NotAnAlgebraError(InputError):
    """The given matrices do not span a unital algebra of the expected dimension."""
