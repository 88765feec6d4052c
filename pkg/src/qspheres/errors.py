"""Exception hierarchy shared by every module of the package."""


class QSpheresError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QSpheresError, ValueError):
    """Invalid parameters, alphabet mismatch, malformed config."""


class ParseError(ConfigurationError):
    """Expression text does not match the grammar.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None and text is not None:
            pointer = " " * position + "^"
            message = f"{message} at position {position}\n  {text}\n  {pointer}"
        super().__init__(message)


class PreconditionError(QSpheresError, ValueError):
    """An operation was called outside its domain."""


class RewriteBudgetExceeded(QSpheresError, RuntimeError):
    """Reduction did not terminate within the rule-application budget.

    This always indicates a mis-oriented rule, never a legitimately large input.
    """


class ThetaDependenceError(QSpheresError, ArithmeticError):
    """A pairing kept a surviving power of the phase parameter t."""


class IdempotentConstructionError(QSpheresError, RuntimeError):
    """An idempotent entry failed its degree check."""
