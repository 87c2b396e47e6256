"""Exception types shared across the package."""


class CrittupleError(Exception):
    """Base class for all package errors."""


class ParseError(CrittupleError):
    """Malformed input text; carries a 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ModelError(CrittupleError):
    """A domain-type invariant was violated (arity conflict, groundness, ...)."""


class PreconditionError(CrittupleError):
    """A documented precondition of a construction or mapping does not hold."""


class GuardError(CrittupleError):
    """An oracle size guard was exceeded; the input is too large to brute-force."""


class BudgetExceededError(CrittupleError):
    """A search ran out of its node or wall-clock budget.

    Distinct from an 'absent'/'not critical' result by contract: silent
    truncation is forbidden.  Carries whatever partial stats were gathered.
    """

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class InternalCheckError(CrittupleError):
    """A result failed its independent re-verification pass (a bug, not bad input)."""
