"""Recursive-descent parser for the identity DSL.

Grammar (whitespace and ``#`` comments ignored)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" int | "^" "(" ["-"] int ")")?
    atom    := number | name | call | "(" expr ")" | idem
    idem    := "idem" "(" name ";" name ("," name)* ")" "{" expr "}"
    list    := "-" | expr ("," expr)*

Function forms: ``qpoch(list; q; n)``, ``qpochc(list; q; b)``,
``qpoch_inf(list; q)``, ``theta(list; q)``, ``phi(list; list; q; z[; zeros=p])``,
``psi(...)``, ``W(a; list; q; z[; zeros=p])``, ``PsiW(...)``,
``gammaq(x; q)``, ``gamma(list)``, ``F(list; list; z)``, ``H(list; list; z)``,
``sqrt(x)``, ``cbrt(x)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DSLSyntaxError
from .nodes import (
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
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),;{}=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, text)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            tokens.append(Token(kind, tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


_SERIES_FUNCS = {"phi": Phi, "psi": Psi}
_WP_FUNCS = {"W": WPUni, "PsiW": WPBi}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset=1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return DSLSyntaxError(msg, tok.line, tok.col, self.text)

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def name(self) -> str:
        if self.tok.kind != "name":
            raise self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        s = self.tok.text
        self.i += 1
        return s

    # -- grammar
    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Mul(e, self.unary())
            elif self.accept("/"):
                e = Div(e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if not self.accept("^"):
            return base
        paren = self.accept("(")
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "num" or not self.tok.text.isdigit():
            raise self.error("exponent must be an integer literal; use sqrt() or cbrt() for roots")
        n = sign * int(self.tok.text)
        self.i += 1
        if paren:
            self.expect(")")
        elif sign < 0:
            raise self.error("negative exponents must be parenthesised, as in a^(-2)")
        return IntPow(base, n)

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(tok.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "name":
            self.i += 1
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(tok)
            return Sym(tok.text)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def plist(self) -> tuple:
        nxt = self.peek()
        if self.tok.text == "-" and nxt.kind == "op" and nxt.text in (";", ")"):
            self.i += 1
            return ()
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        return tuple(items)

    def zeros(self) -> int:
        if not self.accept(";"):
            return 0
        if self.tok.text != "zeros":
            raise self.error("expected 'zeros=<integer>'")
        self.i += 1
        self.expect("=")
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "num" or not self.tok.text.isdigit():
            raise self.error("zeros must be an integer")
        n = sign * int(self.tok.text)
        self.i += 1
        return n

    def call(self, fn: Token) -> Expr:
        name = fn.text
        self.expect("(")
        if name == "idem":
            pivot = self.name()
            self.expect(";")
            alts = [self.name()]
            while self.accept(","):
                alts.append(self.name())
            self.expect(")")
            self.expect("{")
            body = self.expr()
            self.expect("}")
            try:
                return IdemSum(pivot, tuple(alts), body)
            except ValueError as exc:
                raise self.error(str(exc), fn) from None
        if name in ("sqrt", "cbrt"):
            e = Root(self.expr(), 2 if name == "sqrt" else 3)
        elif name in ("qpoch", "qpochc"):
            args = self.plist()
            self.expect(";")
            base = self.expr()
            self.expect(";")
            index = self.expr()
            e = (QPochFinite if name == "qpoch" else QPochIndexed)(args, base, index)
        elif name in ("qpoch_inf", "theta"):
            args = self.plist()
            self.expect(";")
            base = self.expr()
            e = (QPochInf if name == "qpoch_inf" else Theta)(args, base)
        elif name in _SERIES_FUNCS:
            nums = self.plist()
            self.expect(";")
            dens = self.plist()
            self.expect(";")
            base = self.expr()
            self.expect(";")
            z = self.expr()
            e = _SERIES_FUNCS[name](nums, dens, base, z, self.zeros())
        elif name in _WP_FUNCS:
            a = self.expr()
            self.expect(";")
            tail = self.plist()
            self.expect(";")
            base = self.expr()
            self.expect(";")
            z = self.expr()
            e = _WP_FUNCS[name](a, tail, base, z, self.zeros())
        elif name == "gammaq":
            x = self.expr()
            self.expect(";")
            e = GammaQ(x, self.expr())
        elif name == "gamma":
            e = Gamma(self.plist())
        elif name in ("F", "H"):
            nums = self.plist()
            self.expect(";")
            dens = self.plist()
            self.expect(";")
            z = self.expr()
            e = (FSeries if name == "F" else HSeries)(nums, dens, z)
        else:
            raise self.error(f"unknown function {name!r}", fn)
        self.expect(")")
        return e


def parse(text: str) -> Expr:
    """Parse DSL text into an :class:`Expr`."""
    return _Parser(text).parse()
