"""Exceptions raised by the engine.

Every error derives from :class:`DynDistError` and from the builtin it specialises, so callers
can catch either.
"""


class DynDistError(Exception):
    """Base class of all engine errors."""


class ZeroInverse(DynDistError, ZeroDivisionError):
    """Inverse of the zero field element requested."""


class NonUnit(DynDistError, ZeroDivisionError):
    """Truncated polynomial with zero constant term has no inverse."""


class DegreeMismatch(DynDistError, ValueError):
    """Operands were truncated at different degree bounds."""


class ShapeMismatch(DynDistError, ValueError):
    """Matrix operands have incompatible shapes."""


class BadForm(DynDistError, ValueError):
    """A polynomial matrix does not have the identity as its constant coefficient."""


class IndexOutOfRange(DynDistError, IndexError):
    """Index set outside the matrix, or not sorted and duplicate-free."""


class ConstantTermUpdate(DynDistError, ValueError):
    """Element update with a nonzero constant term."""


class SingularPivot(DynDistError, ArithmeticError):
    """Sherman-Morrison denominator is not a unit."""


class DegreeNotTracked(DynDistError, LookupError):
    """Coefficient slice requested for a degree outside the tracked set."""


class DirectedInput(DynDistError, ValueError):
    """Operation requires an undirected graph."""


class NotConnected(DynDistError, ValueError):
    """Operation requires a strongly connected graph."""


class ConfigError(DynDistError, ValueError):
    """Invalid configuration value."""


class ParseError(DynDistError, ValueError):
    """Malformed graph or stream file."""

    line: int
    column: int

    def __init__(self, message: str, line: int = 0, column: int = 0):
        """Create a parse error.

        Args:
            message (str): What went wrong.
            line (int, optional): 1-based line number, 0 if unknown. Defaults to 0.
            column (int, optional): 1-based column number, 0 if unknown. Defaults to 0.
        """
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
