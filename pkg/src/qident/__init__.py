"""Arbitrary-precision basic hypergeometric series and a numerical identity verifier."""

from .errors import (
    BudgetError,
    DivergentSeriesError,
    DSLSyntaxError,
    DuplicateIdError,
    EvaluationError,
    NotFoundError,
    PoleError,
    QIdentError,
    SamplingExhaustedError,
    UndeclaredSymbolError,
    UnknownSymbolError,
    ZeroArgumentError,
)
from .qcore import PrecisionComplex, QBase, TruncationControl

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "DivergentSeriesError",
    "DSLSyntaxError",
    "DuplicateIdError",
    "EvaluationError",
    "NotFoundError",
    "PoleError",
    "PrecisionComplex",
    "QBase",
    "QIdentError",
    "SamplingExhaustedError",
    "TruncationControl",
    "UndeclaredSymbolError",
    "UnknownSymbolError",
    "ZeroArgumentError",
    "__version__",
]
