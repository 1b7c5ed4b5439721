"""Exception taxonomy.

Every error carries the process exit code the command line maps it to.
"""


class NodalZetaError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 5


class ParseError(NodalZetaError):
    exit_code = 1

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        parts = [f"line {line}"] if line is not None else []
        if column is not None:
            parts.append(f"column {column}")
        where = f" ({', '.join(parts)})" if parts else ""
        super().__init__(message + where)


class NotSingular(NodalZetaError):
    """A supplied point is not a singular point of the hypersurface."""

    exit_code = 2


class NotIsolated(NodalZetaError):
    """The singular locus is not the supplied finite set of points."""

    exit_code = 2


class NotODP(NodalZetaError):
    """A singular point is not an ordinary double point."""

    exit_code = 2


class EquisingularityFailure(NodalZetaError):
    exit_code = 3


class PDivides(NodalZetaError):
    """A denominator is divisible by p, so the value has no p-adic unit image."""

    exit_code = 4


class AmbiguousLift(NodalZetaError):
    """The precision window cannot pin down an integer uniquely."""

    exit_code = 4


class WeilViolation(NodalZetaError):
    exit_code = 4


class SingularMatrix(NodalZetaError):
    exit_code = 5


class DimensionMismatch(NodalZetaError):
    exit_code = 5


class TransversalityFailure(NodalZetaError):
    exit_code = 5


class ResidueNotInIdeal(NodalZetaError):
    exit_code = 5


class SingularSolRed(NodalZetaError):
    exit_code = 5


class DegreeMismatch(NodalZetaError):
    exit_code = 5


class BudgetExceeded(NodalZetaError):
    exit_code = 6


class VerificationMismatch(NodalZetaError):
    exit_code = 7
