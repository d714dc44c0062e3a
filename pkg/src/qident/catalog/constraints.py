"""Side conditions attached to catalog identities.

Every constraint reports a *slack*: a real number that is positive exactly
when the condition holds.  The sampler additionally asks for the slack to
reach a per-constraint requirement (a margin floor or a lattice distance),
which keeps sampled points away from boundaries where truncation budgets
blow up or factors vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .. import engine
from ..expr import Evaluator, Expr, Phi, Psi, WPUni, free_symbols, to_text

#: distance from a forbidden lattice point below which a sample is rejected
LATTICE_DELTA = 1e-2

LATTICE_KINDS = ("nonpositive", "positive", "all")


def _ev(ev: Evaluator, e: Expr):
    return ev(e)


class Constraint:
    """Base class.  Subclasses are frozen dataclasses."""

    def symbols(self) -> set[str]:
        raise NotImplementedError

    def slack(self, ev: Evaluator) -> float:
        raise NotImplementedError

    def required(self, floor: float) -> float:
        return 0.0

    def holds(self, ev: Evaluator) -> bool:
        return self.slack(ev) > 0

    def admissible(self, ev: Evaluator, floor: float) -> bool:
        s = self.slack(ev)
        return s > 0 and s >= self.required(floor)

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ModulusLess(Constraint):
    """``|lhs| < |rhs|``; the sampler asks for ``|lhs| <= (1 - margin) |rhs|``."""

    lhs: Expr
    rhs: Expr
    margin: float | None = None

    def symbols(self):
        return free_symbols(self.lhs) | free_symbols(self.rhs)

    def slack(self, ev):
        r = abs(_ev(ev, self.rhs))
        if r == 0:
            return -math.inf
        return float(1 - abs(_ev(ev, self.lhs)) / r)

    def required(self, floor):
        return floor if self.margin is None else self.margin

    def describe(self):
        tail = "" if self.margin is None else f" @{self.margin:g}"
        return f"|{to_text(self.lhs)}| < |{to_text(self.rhs)}|{tail}"


def lattice_distance(x, q, kind: str) -> float:
    """Smallest ``|1 - x q^m|`` over forbidden exponents ``m`` near ``x``.

    ``kind`` selects the forbidden set ``x = q^-m``: ``nonpositive`` means
    ``m >= 0`` (the set ``q^{-N_0}``), ``positive`` means ``m < 0`` (positive
    powers of ``q``), ``all`` means every integer.
    """
    if x == 0:
        return 1.0 if kind == "positive" else math.inf
    lq = float(mpmath.log(abs(q)))
    m0 = round(-float(mpmath.log(abs(x))) / lq)
    best = math.inf
    for m in (m0 - 1, m0, m0 + 1):
        if kind == "nonpositive" and m < 0:
            continue
        if kind == "positive" and m >= 0:
            continue
        best = min(best, float(abs(1 - x * q**m)))
    return best


@dataclass(frozen=True)
class NotInQPowerLattice(Constraint):
    """``e`` stays off a lattice of powers of ``q`` (see :func:`lattice_distance`)."""

    e: Expr
    kind: str = "nonpositive"

    def __post_init__(self):
        if self.kind not in LATTICE_KINDS:
            raise ValueError(f"lattice kind must be one of {LATTICE_KINDS}")

    def symbols(self):
        return free_symbols(self.e) | {"q"}

    def slack(self, ev):
        return lattice_distance(_ev(ev, self.e), ev.values["q"], self.kind)

    def holds(self, ev):
        return self.slack(ev) > 1e-12

    def required(self, floor):
        return LATTICE_DELTA

    def describe(self):
        return f"lattice({to_text(self.e)}; {self.kind})"


@dataclass(frozen=True)
class NonZero(Constraint):
    e: Expr

    def symbols(self):
        return free_symbols(self.e)

    def slack(self, ev):
        return float(abs(_ev(ev, self.e)))

    def required(self, floor):
        return LATTICE_DELTA

    def describe(self):
        return f"nonzero({to_text(self.e)})"


@dataclass(frozen=True)
class NotUnity(Constraint):
    e: Expr

    def symbols(self):
        return free_symbols(self.e)

    def slack(self, ev):
        return float(abs(1 - _ev(ev, self.e)))

    def required(self, floor):
        return LATTICE_DELTA

    def describe(self):
        return f"notunity({to_text(self.e)})"


@dataclass(frozen=True)
class RePositive(Constraint):
    """``Re(e) > 0``; used by the classical entries."""

    e: Expr
    margin: float | None = None

    def symbols(self):
        return free_symbols(self.e)

    def slack(self, ev):
        return float(mpmath.re(_ev(ev, self.e)))

    def required(self, floor):
        return floor if self.margin is None else self.margin

    def describe(self):
        tail = "" if self.margin is None else f" @{self.margin:g}"
        return f"re({to_text(self.e)}) > 0{tail}"


@dataclass(frozen=True)
class SeriesConverges(Constraint):
    """The series node converges, with margin (see :func:`engine.classify_raw`)."""

    node: Expr

    def symbols(self):
        return free_symbols(self.node)

    def slack(self, ev):
        n = self.node
        q = ev(n.base)
        z = ev(n.z)
        if isinstance(n, (Phi, Psi)):
            nums = [ev(x) for x in n.nums]
            dens = [ev(x) for x in n.dens]
            fn = engine.phi_classify if isinstance(n, Phi) else engine.psi_classify
            conv = fn(nums, dens, q, z, n.zeros)
        else:
            a = ev(n.a)
            tail = [ev(x) for x in n.tail]
            fn = engine.wp_uni_classify if isinstance(n, WPUni) else engine.wp_bi_classify
            conv = fn(a, tail, q, z, n.zeros)
        if conv.kind == "divergent":
            return min(float(conv.margin), 0.0) - 1.0
        return float(conv.margin)

    def required(self, floor):
        return floor

    def describe(self):
        return f"converges({to_text(self.node)})"


def holds_all(constraints, ev: Evaluator) -> bool:
    return all(c.holds(ev) for c in constraints)


__all__ = [
    "Constraint",
    "LATTICE_DELTA",
    "ModulusLess",
    "NonZero",
    "NotInQPowerLattice",
    "NotUnity",
    "RePositive",
    "SeriesConverges",
    "holds_all",
    "lattice_distance",
]
