"""Exception types shared across the package."""


class ComparisonError(Exception):
    """Base class for all package errors."""


class ContextMismatch(ComparisonError, ValueError):
    """Operands live in different groups, or a point has the wrong arity."""


class PreconditionError(ComparisonError, ValueError):
    """Inputs violate the stated precondition of an operation.

    ``witness`` carries whatever object pins down the violation (a tile, a
    point pair, a Hall subset ...).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BoundaryInconclusive(ComparisonError):
    """A margin-mode computation needed points outside the window."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(ComparisonError, RuntimeError):
    """An exhaustive enumeration ran past its configured budget."""


class TheoremViolation(ComparisonError, AssertionError):
    """A proven inequality or invariant failed; always an implementation bug."""
