"""Numerical evaluation of expression trees."""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpc, mpf

from .. import classical, engine
from ..errors import EvaluationError, PoleError, UnknownSymbolError, ZeroArgumentError
from ..qcore import (
    DEFAULT_DIGITS,
    GUARD_DIGITS,
    PrecisionComplex,
    QBase,
    TruncationControl,
    qpoch_index_raw,
    qpoch_inf_raw,
    qpoch_n_raw,
    theta_raw,
)
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


@dataclass
class ParamEnv:
    """Symbol bindings plus the base ``q``.

    Values may be given as numbers or strings; they are stored as
    :class:`PrecisionComplex` at ``digits``.
    """

    bindings: dict = field(default_factory=dict)
    q: QBase | None = None
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        b = {}
        for name, v in self.bindings.items():
            pc = v if isinstance(v, PrecisionComplex) else PrecisionComplex(v, self.digits)
            if pc.value == 0:
                raise ZeroArgumentError(f"symbol {name!r} must be nonzero")
            b[name] = pc
        self.bindings = b
        if self.q is not None and not isinstance(self.q, QBase):
            self.q = QBase(self.q, self.digits)

    def raw(self) -> dict:
        out = {k: v.value for k, v in self.bindings.items()}
        if self.q is not None:
            out["q"] = self.q.q.value
        return out


class Evaluator:
    """Evaluates nodes at the active mpmath precision.

    ``terms`` accumulates the number of series terms summed.
    """

    def __init__(self, values: dict, ctl: TruncationControl):
        self.values = dict(values)
        self.ctl = ctl
        self.terms = 0

    def __call__(self, e: Expr, path="") -> mpc:
        return self.ev(e, path or type(e).__name__)

    def ev(self, e: Expr, path: str) -> mpc:
        try:
            return self._dispatch(e, path)
        except EvaluationError:
            raise
        except Exception as exc:  # tag every failure with its location
            raise EvaluationError(path, exc) from exc

    def _child(self, e, path, label):
        return self.ev(e, f"{path}/{label}:{type(e).__name__}")

    def _list(self, items, path, label):
        return [self._child(x, path, f"{label}[{k}]") for k, x in enumerate(items)]

    def _base(self, e, path):
        q = self._child(e, path, "base")
        if not 0 < abs(q) < 1:
            raise ValueError("base must satisfy 0 < |q| < 1")
        return q

    def _dispatch(self, e: Expr, path: str) -> mpc:
        t = type(e)
        if t is Const:
            return mpc(mpf(e.text))
        if t is Sym:
            v = self.values.get(e.name)
            if v is not None:
                return v
            if e.name == "i":
                return mpc(0, 1)
            if e.name == "omega":
                return mpmath.expjpi(mpf(2) / 3)
            raise UnknownSymbolError(f"symbol {e.name!r} is not bound")
        if t is Add:
            return self._child(e.left, path, "left") + self._child(e.right, path, "right")
        if t is Sub:
            return self._child(e.left, path, "left") - self._child(e.right, path, "right")
        if t is Mul:
            return self._child(e.left, path, "left") * self._child(e.right, path, "right")
        if t is Div:
            num = self._child(e.left, path, "left")
            den = self._child(e.right, path, "right")
            if den == 0 or abs(den) < mpf(10) ** (-mp.dps):
                raise PoleError("division by a vanishing factor")
            return num / den
        if t is Neg:
            return -self._child(e.arg, path, "arg")
        if t is IntPow:
            base = self._child(e.base, path, "base")
            if e.exponent < 0 and base == 0:
                raise PoleError("negative power of zero")
            return base**e.exponent
        if t is Root:
            x = self._child(e.base, path, "base")
            return mpmath.sqrt(x) if e.degree == 2 else mpmath.root(x, 3)
        if t is QPochFinite:
            q = self._base(e.base, path)
            n = self._integer(self._child(e.index, path, "index"))
            out = mpc(1)
            for a in self._list(e.args, path, "args"):
                out *= qpoch_n_raw(a, q, n)
            return out
        if t is QPochIndexed:
            q = self._base(e.base, path)
            b = self._child(e.index, path, "index")
            out = mpc(1)
            for a in self._list(e.args, path, "args"):
                out *= qpoch_index_raw(a, q, b, self.ctl)
            return out
        if t is QPochInf:
            q = self._base(e.base, path)
            out = mpc(1)
            for a in self._list(e.args, path, "args"):
                out *= qpoch_inf_raw(a, q, self.ctl)
            return out
        if t is Theta:
            q = self._base(e.base, path)
            out = mpc(1)
            for z in self._list(e.args, path, "args"):
                out *= theta_raw(z, q, self.ctl)
            return out
        if t is Phi or t is Psi:
            nums = self._list(e.nums, path, "nums")
            dens = self._list(e.dens, path, "dens")
            q = self._base(e.base, path)
            z = self._child(e.z, path, "z")
            fn = engine.phi_raw if t is Phi else engine.psi_raw
            value, terms, _ = fn(nums, dens, q, z, e.zeros, self.ctl)
            self.terms += terms
            return value
        if t is WPUni or t is WPBi:
            a = self._child(e.a, path, "a")
            tail = self._list(e.tail, path, "tail")
            q = self._base(e.base, path)
            z = self._child(e.z, path, "z")
            fn = engine.wp_uni_raw if t is WPUni else engine.wp_bi_raw
            value, terms, _ = fn(a, tail, q, z, e.zeros, self.ctl)
            self.terms += terms
            return value
        if t is IdemSum:
            return self._idem(e, path)
        if t is GammaQ:
            x = self._child(e.arg, path, "arg")
            q = self._base(e.base, path)
            return classical.gamma_q_raw(x, q, self.ctl)
        if t is Gamma:
            out = mpc(1)
            for x in self._list(e.args, path, "args"):
                out *= classical.gamma_raw(x)
            return out
        if t is FSeries or t is HSeries:
            nums = self._list(e.nums, path, "nums")
            dens = self._list(e.dens, path, "dens")
            z = self._child(e.z, path, "z")
            value, terms, _ = classical.classical_raw(
                "F" if t is FSeries else "H", nums, dens, z, self.ctl
            )
            self.terms += terms
            return value
        raise TypeError(f"cannot evaluate node {t.__name__}")

    @staticmethod
    def _integer(x: mpc) -> int:
        n = int(mpmath.nint(x.real))
        if abs(x - n) > mpf(10) ** (-(mp.dps - GUARD_DIGITS) + 2):
            raise ValueError("finite q-Pochhammer index must be an integer")
        return n

    def _idem(self, e: IdemSum, path: str) -> mpc:
        names = (e.pivot,) + tuple(e.alternatives)
        for n in names:
            if n not in self.values:
                raise UnknownSymbolError(f"symbol {n!r} is not bound")
        saved = dict(self.values)
        total = self._child(e.body, path, "body[0]")
        try:
            for k, alt in enumerate(e.alternatives, start=1):
                self.values[e.pivot], self.values[alt] = saved[alt], saved[e.pivot]
                total += self._child(e.body, path, f"body[{k}]")
                self.values[e.pivot], self.values[alt] = saved[e.pivot], saved[alt]
        finally:
            self.values = saved
        return total


def evaluate_detailed(e: Expr, env: ParamEnv, ctl: TruncationControl | None = None, digits=None):
    """Value of ``e`` at ``env`` and the number of series terms summed."""
    digits = digits or env.digits
    ctl = ctl or TruncationControl.for_digits(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        ev = Evaluator(env.raw(), ctl)
        value = ev(e)
    return PrecisionComplex(value, digits), ev.terms


def evaluate(e: Expr, env: ParamEnv, ctl: TruncationControl | None = None, digits=None) -> PrecisionComplex:
    """Value of ``e`` at ``env``; failures raise :class:`EvaluationError`."""
    return evaluate_detailed(e, env, ctl, digits)[0]
