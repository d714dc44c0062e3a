"""Expression trees for identity sides: nodes, DSL parser, printer and evaluator."""

from ..errors import UnknownSymbolError
from .evaluate import Evaluator, ParamEnv, evaluate, evaluate_detailed
from .nodes import (
    BUILTIN_CONSTANTS,
    SERIES_NODES,
    Add,
    Const,
    Div,
    Expr,
    FSeries,
    Gamma,
    GammaQ,
    HSeries,
    IdemSum,
    IntPow,
    Mul,
    Neg,
    Phi,
    Psi,
    QPochFinite,
    QPochIndexed,
    QPochInf,
    Root,
    Sub,
    Sym,
    Theta,
    WPBi,
    WPUni,
    expand_idem,
    free_symbols,
    rename,
    substitute,
    to_text,
    walk,
)
from .parser import parse as _parse
from .parser import tokenize


def parse(text: str, symbols=None) -> Expr:
    """Parse DSL text.

    When ``symbols`` is given, any free symbol outside it (other than the
    builtins ``i`` and ``omega``) raises :class:`UnknownSymbolError`.
    """
    e = _parse(text)
    if symbols is not None:
        unknown = sorted(free_symbols(e) - set(symbols))
        if unknown:
            raise UnknownSymbolError(f"unknown symbol(s): {', '.join(unknown)}")
    return e


__all__ = [
    "BUILTIN_CONSTANTS", "SERIES_NODES", "Add", "Const", "Div", "Evaluator", "Expr",
    "FSeries", "Gamma", "GammaQ", "HSeries", "IdemSum", "IntPow", "Mul", "Neg",
    "ParamEnv", "Phi", "Psi", "QPochFinite", "QPochIndexed", "QPochInf", "Root", "Sub",
    "Sym", "Theta", "WPBi", "WPUni", "evaluate", "evaluate_detailed", "expand_idem",
    "free_symbols", "parse", "rename", "substitute", "to_text", "tokenize", "walk",
]
