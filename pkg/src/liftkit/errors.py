"""Exception taxonomy shared by all modules."""

from __future__ import annotations


class LiftkitError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LiftkitError):
    """Malformed or inconsistent input (wrong dimension, bad option value)."""


class DomainError(LiftkitError):
    """A point lies outside the open subset a map or space is defined on."""


class ParseError(InputError):
    """Expression source text is not well formed.

    Carries the byte offset of the failure and the set of token kinds that
    would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(message)
        self.offset = int(offset)
        self.expected = frozenset(expected)

    def __str__(self):
        base = super().__str__()
        if self.expected:
            opts = ", ".join(sorted(self.expected))
            return "%s (offset %d; expected %s)" % (base, self.offset, opts)
        return "%s (offset %d)" % (base, self.offset)


class EvalDomainError(LiftkitError):
    """Evaluation hit a domain fault: log/sqrt of a negative number,
    division by zero, or a non-finite intermediate value."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span


class SingularJacobianError(LiftkitError):
    """A linear solve met a Jacobian that is singular at working precision."""


class NonConvergenceError(LiftkitError):
    """An iterative solver exhausted its budget without meeting tolerance."""


class DegenerateInputError(InputError):
    """An input is degenerate for the requested operation (zero-length
    subpath, coincident endpoints, empty sample set)."""
