"""Exception hierarchy shared by every module of the package."""


class WilczynskiError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(WilczynskiError, ValueError):
    """Malformed equation or expression text."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class PoleError(WilczynskiError, ZeroDivisionError):
    """A denominator vanished (exactly or at an evaluation point)."""


class UnassignedVariableError(WilczynskiError, KeyError):
    """Evaluation point does not assign every variable of the expression."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unassigned variable"


class DimensionError(WilczynskiError, ValueError):
    """Incompatible matrix shapes."""


class PreconditionError(WilczynskiError, ValueError):
    """Input violates a documented precondition of an operation."""


class ComputationTimeout(WilczynskiError):
    """Cooperative deadline exceeded between computation steps."""
