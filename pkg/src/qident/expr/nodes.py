"""Immutable AST for identity sides, with a canonical printer."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Iterator

BUILTIN_CONSTANTS = frozenset({"i", "omega"})


class Expr:
    """Base class of all nodes.  Subclasses are frozen dataclasses."""

    __slots__ = ()

    def children(self) -> Iterator["Expr"]:
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Expr):
                yield v
            elif isinstance(v, tuple):
                for x in v:
                    if isinstance(x, Expr):
                        yield x

    def __str__(self):
        return to_text(self)


def _node(cls):
    return dataclass(frozen=True)(cls)


@_node
class Const(Expr):
    text: str


@_node
class Sym(Expr):
    name: str


@_node
class Add(Expr):
    left: Expr
    right: Expr


@_node
class Sub(Expr):
    left: Expr
    right: Expr


@_node
class Mul(Expr):
    left: Expr
    right: Expr


@_node
class Div(Expr):
    left: Expr
    right: Expr


@_node
class Neg(Expr):
    arg: Expr


@_node
class IntPow(Expr):
    base: Expr
    exponent: int


@_node
class Root(Expr):
    base: Expr
    degree: int

    def __post_init__(self):
        if self.degree not in (2, 3):
            raise ValueError("only square and cube roots are supported")


@_node
class QPochFinite(Expr):
    args: tuple
    base: Expr
    index: Expr


@_node
class QPochIndexed(Expr):
    args: tuple
    base: Expr
    index: Expr


@_node
class QPochInf(Expr):
    args: tuple
    base: Expr


@_node
class Theta(Expr):
    args: tuple
    base: Expr


@_node
class Phi(Expr):
    nums: tuple
    dens: tuple
    base: Expr
    z: Expr
    zeros: int = 0


@_node
class Psi(Expr):
    nums: tuple
    dens: tuple
    base: Expr
    z: Expr
    zeros: int = 0


@_node
class WPUni(Expr):
    a: Expr
    tail: tuple
    base: Expr
    z: Expr
    zeros: int = 0


@_node
class WPBi(Expr):
    a: Expr
    tail: tuple
    base: Expr
    z: Expr
    zeros: int = 0


@_node
class IdemSum(Expr):
    pivot: str
    alternatives: tuple
    body: Expr

    def __post_init__(self):
        names = (self.pivot,) + tuple(self.alternatives)
        if len(set(names)) != len(names):
            raise ValueError("idem alternatives must be distinct from each other and the pivot")


@_node
class GammaQ(Expr):
    arg: Expr
    base: Expr


@_node
class Gamma(Expr):
    args: tuple


@_node
class FSeries(Expr):
    nums: tuple
    dens: tuple
    z: Expr


@_node
class HSeries(Expr):
    nums: tuple
    dens: tuple
    z: Expr


SERIES_NODES = (Phi, Psi, WPUni, WPBi, FSeries, HSeries)


# ---------------------------------------------------------------------------
# traversal helpers


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    yield e
    for c in e.children():
        yield from walk(c)


def free_symbols(e: Expr) -> set[str]:
    """Names of all symbols; idem pivots and alternatives count as free."""
    out = set()
    for node in walk(e):
        if isinstance(node, Sym) and node.name not in BUILTIN_CONSTANTS:
            out.add(node.name)
        elif isinstance(node, IdemSum):
            out.add(node.pivot)
            out.update(node.alternatives)
    return out


def map_children(e: Expr, fn) -> Expr:
    """Rebuild ``e`` with ``fn`` applied to every direct child expression."""
    changes = {}
    for f in fields(e):
        v = getattr(e, f.name)
        if isinstance(v, Expr):
            changes[f.name] = fn(v)
        elif isinstance(v, tuple) and any(isinstance(x, Expr) for x in v):
            changes[f.name] = tuple(fn(x) if isinstance(x, Expr) else x for x in v)
    return replace(e, **changes) if changes else e


def rename(e: Expr, mapping: dict[str, str]) -> Expr:
    """Simultaneous renaming of symbols (idem pivots included)."""
    if isinstance(e, Sym):
        return Sym(mapping.get(e.name, e.name))
    if isinstance(e, IdemSum):
        return IdemSum(
            mapping.get(e.pivot, e.pivot),
            tuple(mapping.get(x, x) for x in e.alternatives),
            rename(e.body, mapping),
        )
    return map_children(e, lambda c: rename(c, mapping))


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace symbols by expressions (idem pivots must not be substituted)."""
    if isinstance(e, Sym):
        return mapping.get(e.name, e)
    return map_children(e, lambda c: substitute(c, mapping))


def expand_idem(e: Expr) -> Expr:
    """Replace every idem node by an explicit sum of symbol-swapped bodies."""
    if isinstance(e, IdemSum):
        body = expand_idem(e.body)
        out = body
        for alt in e.alternatives:
            out = Add(out, rename(body, {e.pivot: alt, alt: e.pivot}))
        return out
    return map_children(e, expand_idem)


# ---------------------------------------------------------------------------
# printer

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, IntPow: 4}


def _prec(e: Expr) -> int:
    return _PREC.get(type(e), 5)


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_text(e)
    return f"({s})" if _prec(e) < min_prec else s


def _lst(items) -> str:
    return ", ".join(to_text(x) for x in items) if items else "-"


def _zeros(z: int) -> str:
    return f"; zeros={z}" if z else ""


def to_text(e: Expr) -> str:
    """Canonical DSL text; ``parse(to_text(e)) == e``."""
    t = type(e)
    if t is Const:
        return e.text
    if t is Sym:
        return e.name
    if t in (Add, Sub, Mul, Div):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[t]
        p = _PREC[t]
        return f"{_wrap(e.left, p)} {op} {_wrap(e.right, p + 1)}"
    if t is Neg:
        return f"-{_wrap(e.arg, 3)}"
    if t is IntPow:
        exp = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{_wrap(e.base, 5)}^{exp}"
    if t is Root:
        return f"{'sqrt' if e.degree == 2 else 'cbrt'}({to_text(e.base)})"
    if t is QPochFinite:
        return f"qpoch({_lst(e.args)}; {to_text(e.base)}; {to_text(e.index)})"
    if t is QPochIndexed:
        return f"qpochc({_lst(e.args)}; {to_text(e.base)}; {to_text(e.index)})"
    if t is QPochInf:
        return f"qpoch_inf({_lst(e.args)}; {to_text(e.base)})"
    if t is Theta:
        return f"theta({_lst(e.args)}; {to_text(e.base)})"
    if t in (Phi, Psi):
        name = "phi" if t is Phi else "psi"
        return (
            f"{name}({_lst(e.nums)}; {_lst(e.dens)}; {to_text(e.base)}; "
            f"{to_text(e.z)}{_zeros(e.zeros)})"
        )
    if t in (WPUni, WPBi):
        name = "W" if t is WPUni else "PsiW"
        return (
            f"{name}({to_text(e.a)}; {_lst(e.tail)}; {to_text(e.base)}; "
            f"{to_text(e.z)}{_zeros(e.zeros)})"
        )
    if t is IdemSum:
        return f"idem({e.pivot}; {', '.join(e.alternatives)}){{{to_text(e.body)}}}"
    if t is GammaQ:
        return f"gammaq({to_text(e.arg)}; {to_text(e.base)})"
    if t is Gamma:
        return f"gamma({_lst(e.args)})"
    if t in (FSeries, HSeries):
        name = "F" if t is FSeries else "H"
        return f"{name}({_lst(e.nums)}; {_lst(e.dens)}; {to_text(e.z)})"
    raise TypeError(f"unknown node {t.__name__}")
