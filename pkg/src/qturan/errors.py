"""Exception hierarchy shared across the package.

Everything raised on purpose derives from QturanError so callers can
catch library failures without swallowing genuine bugs.  The CLI maps
these onto exit codes, so the split between parameter problems, parse
problems, and budget exhaustion matters.
"""

from __future__ import annotations


class QturanError(Exception):
    """Base class for all deliberate failures raised by this package."""


class ParameterError(QturanError, ValueError):
    """Arguments are out of range or mutually inconsistent."""


class StructureError(ParameterError):
    """A hypergraph, pattern, or certificate is malformed."""


class ParseError(QturanError, ValueError):
    """An input file or pattern string could not be parsed."""


class BudgetError(QturanError, RuntimeError):
    """An exhaustive search exceeded its node budget before finishing."""


class InvariantViolation(QturanError, RuntimeError):
    """An internal consistency check failed on data we produced ourselves.

    Raised when a certified object fails re-verification or when a
    mathematically guaranteed inequality does not hold.  Seeing this
    means a bug, not bad user input.
    """


class BaseNotFreeError(ParameterError):
    """A construction ingredient fails a required freeness precondition.

    Carries the offending certificate so callers can inspect or report
    the embedding that was found.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate
