"""Exception hierarchy shared by every qident module."""


class QIdentError(Exception):
    """Base class for all qident errors."""


class PoleError(QIdentError, ZeroDivisionError):
    """A factor that must be divided by vanishes within the pole tolerance."""


class ZeroArgumentError(QIdentError, ValueError):
    """An argument required to be nonzero is zero."""


class BudgetError(QIdentError, RuntimeError):
    """The term budget ran out before the truncation bound was met."""


class DivergentSeriesError(QIdentError, ArithmeticError):
    """The requested series does not converge at the given parameters."""


class DSLSyntaxError(QIdentError, SyntaxError):
    """Malformed expression text. Carries 1-based line and column."""

    def __init__(self, message, line=1, column=1, text=None):
        super().__init__(f"{message} (line {line}, column {column})")
        self.msg = message
        self.lineno = line
        self.offset = column
        self.text = text


class UnknownSymbolError(QIdentError, NameError):
    """An expression references a symbol that is neither bound nor declared."""


class UndeclaredSymbolError(UnknownSymbolError):
    """A catalog expression uses a symbol missing from the entry's symbol list."""


class DuplicateIdError(QIdentError, ValueError):
    """Two catalog entries share an id."""


class NotFoundError(QIdentError, KeyError):
    """Lookup of an unknown catalog id."""


class SamplingExhaustedError(QIdentError, RuntimeError):
    """No admissible parameter point was found within the rejection budget."""


class EvaluationError(QIdentError):
    """Evaluation failure tagged with the AST path where it happened."""

    def __init__(self, path, cause):
        self.path = path
        self.cause = cause
        super().__init__(f"at {path}: {type(cause).__name__}: {cause}")
