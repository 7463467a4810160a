"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit codes, so the classes are kept flat.
"""


class BifdimError(Exception):
    """Base class for errors raised by this package."""


class ParseError(BifdimError, ValueError):
    """Syntax error in a map expression.

    ``offset`` is the byte offset into the source where parsing failed.
    """

    def __init__(self, message, offset, source=""):
        self.message = message
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")

    def pointer(self):
        """Two-line rendering of the source with a caret under the offset."""
        return f"{self.source}\n{' ' * self.offset}^"


class UnknownIdentifierError(ParseError):
    pass


class DomainError(BifdimError, ArithmeticError):
    """Numeric domain violation (log of nonpositive, division by zero, ...)."""


class PreconditionError(BifdimError, ValueError):
    """Input violates an estimator or classifier precondition."""
