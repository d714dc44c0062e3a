"""q-Pochhammer symbols and modified theta functions at arbitrary precision.

Every public function takes :class:`PrecisionComplex` (or plain numbers),
works internally at ``digits + GUARD_DIGITS`` decimal digits and rounds the
result back to ``digits``.  The ``*_raw`` kernels operate on bare
``mpmath.mpc`` values at whatever precision is currently active; the series
engine and the expression evaluator call those directly so that a whole
identity side is computed under a single precision context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Number

import mpmath
from mpmath import mp, mpc, mpf

from .errors import BudgetError, PoleError, ZeroArgumentError

GUARD_DIGITS = 10
DEFAULT_DIGITS = 50
MIN_DIGITS = 15


class PrecisionComplex:
    """A complex number carried at a fixed number of decimal digits.

    Binary operations run at the larger of the two operands' precisions.
    """

    __slots__ = ("_value", "_digits")

    def __init__(self, value=0, digits=DEFAULT_DIGITS):
        if isinstance(value, PrecisionComplex):
            digits = max(digits, value.digits) if digits != DEFAULT_DIGITS else value.digits
            value = value.value
        if int(digits) != digits or digits < MIN_DIGITS:
            raise ValueError(f"digits must be an integer >= {MIN_DIGITS}, got {digits!r}")
        self._digits = int(digits)
        with mp.workdps(self._digits):
            self._value = _to_mpc(value)

    @property
    def value(self) -> mpc:
        return self._value

    @property
    def digits(self) -> int:
        return self._digits

    @property
    def re(self) -> mpf:
        return self._value.real

    @property
    def im(self) -> mpf:
        return self._value.imag

    def __abs__(self):
        with mp.workdps(self._digits):
            return abs(self._value)

    def __complex__(self):
        return complex(self._value)

    def _binary(self, other, op):
        if isinstance(other, PrecisionComplex):
            digits, rhs = max(self._digits, other._digits), other._value
        elif isinstance(other, (Number, mpf, mpc, str)):
            digits, rhs = self._digits, other
        else:
            return NotImplemented
        with mp.workdps(digits):
            return PrecisionComplex(op(self._value, _to_mpc(rhs)), digits)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    def __radd__(self, other):
        return self._binary(other, lambda x, y: y + x)

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    def __rmul__(self, other):
        return self._binary(other, lambda x, y: y * x)

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x / y)

    def __rtruediv__(self, other):
        return self._binary(other, lambda x, y: y / x)

    def __pow__(self, n):
        if isinstance(n, PrecisionComplex):
            return self._binary(n, lambda x, y: x ** y)
        return self._binary(n, lambda x, y: x ** y)

    def __neg__(self):
        return PrecisionComplex(-self._value, self._digits)

    def __eq__(self, other):
        if isinstance(other, PrecisionComplex):
            return self._value == other._value
        try:
            return self._value == _to_mpc(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self._value)

    def __repr__(self):
        return f"PrecisionComplex({mpmath.nstr(self._value, min(self._digits, 20))}, digits={self._digits})"

    def to_string(self, n=None) -> str:
        """``"re,im"`` with ``n`` significant digits (default: all)."""
        n = n or self._digits
        with mp.workdps(self._digits):
            return f"{mpmath.nstr(self._value.real, n)},{mpmath.nstr(self._value.imag, n)}"


def _to_mpc(x) -> mpc:
    if isinstance(x, PrecisionComplex):
        return x.value
    if isinstance(x, QBase):
        return x.q.value
    if isinstance(x, str):
        return parse_complex(x)
    return mpc(x)


def parse_complex(text: str) -> mpc:
    """Parse ``"0.3+0.1i"``, ``"2"``, ``"-1.5e-3j"`` or ``"0.3,0.1"`` into an mpc."""
    s = text.strip().replace(" ", "")
    if "," in s:
        re_s, im_s = s.split(",", 1)
        return mpc(mpf(re_s), mpf(im_s))
    s = s.replace("j", "i")
    if not s.endswith("i"):
        return mpc(mpf(s))
    body = s[:-1]
    # find the sign separating real and imaginary parts, skipping exponent signs
    split = None
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            split = k
            break
    if split is None:
        im = body if body not in ("", "+", "-") else body + "1"
        return mpc(0, mpf(im))
    re_s, im_s = body[:split], body[split:]
    if im_s in ("+", "-"):
        im_s += "1"
    return mpc(mpf(re_s), mpf(im_s))


class QBase:
    """The base ``q`` of a q-series; requires ``0 < |q| < 1``."""

    __slots__ = ("_q",)

    def __init__(self, q, digits=None):
        if isinstance(q, QBase):
            q = q.q
        if not isinstance(q, PrecisionComplex):
            q = PrecisionComplex(q, digits or DEFAULT_DIGITS)
        elif digits is not None and digits != q.digits:
            q = PrecisionComplex(q.value, digits)
        m = abs(q)
        if not 0 < m < 1:
            raise ValueError(f"base must satisfy 0 < |q| < 1, got |q| = {mpmath.nstr(m, 8)}")
        self._q = q

    @property
    def q(self) -> PrecisionComplex:
        return self._q

    @property
    def digits(self) -> int:
        return self._q.digits

    def __repr__(self):
        return f"QBase({self._q!r})"


@dataclass(frozen=True)
class TruncationControl:
    """Stopping parameters for infinite products and series.

    ``min_margin`` is the convergence margin below which a conditionally
    convergent series is refused.
    """

    tail_epsilon: mpf
    max_terms: int = 200_000
    consecutive_small: int = 3
    min_margin: float = 1e-3

    def __post_init__(self):
        if not self.tail_epsilon > 0:
            raise ValueError("tail_epsilon must be positive")
        if self.max_terms < 64:
            raise ValueError("max_terms must be at least 64")
        if self.consecutive_small < 2:
            raise ValueError("consecutive_small must be at least 2")
        if not 0 <= self.min_margin < 1:
            raise ValueError("min_margin must lie in [0, 1)")

    @classmethod
    def for_digits(cls, digits: int, guard: int = GUARD_DIGITS, **kw) -> "TruncationControl":
        return cls(tail_epsilon=mpf(10) ** (-(digits + guard)), **kw)


def _prepare(*args):
    """Common precision of the arguments and their raw values."""
    digits = MIN_DIGITS
    seen = False
    for x in args:
        if isinstance(x, (PrecisionComplex, QBase)):
            digits = max(digits, x.digits)
            seen = True
    if not seen:
        digits = DEFAULT_DIGITS
    return digits


def _ctl(ctl, digits):
    return ctl if ctl is not None else TruncationControl.for_digits(digits)


def pole_tolerance() -> mpf:
    """Modulus below which a factor counts as vanishing, ``10^(-digits+2)``.

    ``digits`` is the user precision, i.e. the active precision minus guard.
    """
    return mpf(10) ** (-(mp.dps - GUARD_DIGITS) + 2)


def _q_of(q) -> mpc:
    if isinstance(q, QBase):
        return q.q.value
    if isinstance(q, PrecisionComplex):
        value = q.value
    else:
        value = mpc(q)
    if not 0 < abs(value) < 1:
        raise ValueError("base must satisfy 0 < |q| < 1")
    return value


def _finish(value, digits) -> PrecisionComplex:
    return PrecisionComplex(value, digits)


# ---------------------------------------------------------------------------
# raw kernels (current mp precision, mpc in / mpc out)


def qpoch_n_raw(a: mpc, q: mpc, n: int) -> mpc:
    if n >= 0:
        prod = mpc(1)
        x = a
        for _ in range(n):
            prod *= 1 - x
            x *= q
        return prod
    tol = pole_tolerance()
    prod = mpc(1)
    x = a
    for _ in range(-n):
        x /= q
        f = 1 - x
        if abs(f) < tol:
            raise PoleError(f"(a;q)_{n} has a vanishing factor 1 - a q^-j")
        prod *= f
    return 1 / prod


def qpoch_inf_raw(a: mpc, q: mpc, ctl: TruncationControl) -> mpc:
    if a == 0:
        return mpc(1)
    eps = float(ctl.tail_epsilon) if ctl.tail_epsilon > mpf("1e-300") else 0.0
    log_eps = float(mpmath.log(ctl.tail_epsilon))
    absq = float(abs(q))
    log_absq = math.log(absq)
    log_one_minus_q = math.log1p(-absq)
    prod = mpc(1)
    x = a
    n = 0
    while True:
        mx = float(abs(x))
        if mx < 0.5:
            # |log prod_{m>=n}(1 - a q^m)| <= |a q^n| / ((1-|q|)(1-|a q^n|))
            log_bound = math.log(mx) - log_one_minus_q - math.log1p(-mx) if mx > 0 else -math.inf
            if log_bound <= log_eps:
                return prod
            # jump straight to the index where the bound holds
            if mx > 0:
                need = int((log_eps + log_one_minus_q + math.log1p(-mx) - math.log(mx)) / log_absq)
                if need > 0:
                    if n + need > ctl.max_terms:
                        raise BudgetError(f"infinite product needs more than {ctl.max_terms} factors")
                    for _ in range(need):
                        prod *= 1 - x
                        x *= q
                    n += need
                    continue
        prod *= 1 - x
        if prod == 0:
            return prod
        x *= q
        n += 1
        if n > ctl.max_terms:
            raise BudgetError(f"infinite product needs more than {ctl.max_terms} factors")
    del eps


def qpoch_index_raw(a: mpc, q: mpc, b, ctl: TruncationControl) -> mpc:
    """(a;q)_b for integer, complex or infinite b."""
    if b is None or b == math.inf:
        return qpoch_inf_raw(a, q, ctl)
    if isinstance(b, int) or (isinstance(b, (mpf, float)) and b == int(b)):
        return qpoch_n_raw(a, q, int(b))
    b = mpc(b)
    if b.imag == 0 and b.real == int(b.real):
        return qpoch_n_raw(a, q, int(b.real))
    qb = mpmath.exp(b * mpmath.log(q))
    den = qpoch_inf_raw(qb * a, q, ctl)
    if abs(den) < pole_tolerance():
        raise PoleError("(q^b a; q)_inf vanishes")
    return qpoch_inf_raw(a, q, ctl) / den


def theta_raw(z: mpc, q: mpc, ctl: TruncationControl) -> mpc:
    if z == 0:
        raise ZeroArgumentError("theta(z; q) requires z != 0")
    return qpoch_inf_raw(z, q, ctl) * qpoch_inf_raw(q / z, q, ctl)


# ---------------------------------------------------------------------------
# public API


def qpoch_n(a, q, n: int) -> PrecisionComplex:
    """Finite q-shifted factorial ``(a;q)_n`` for any integer ``n``.

    For ``n < 0`` this is ``1 / prod_{j=1}^{-n} (1 - a q^-j)``; a vanishing
    factor raises :class:`PoleError`.
    """
    if int(n) != n:
        raise TypeError("qpoch_n needs an integer index; use qpoch_complex_index")
    digits = _prepare(a, q)
    with mp.workdps(digits + GUARD_DIGITS):
        value = qpoch_n_raw(_to_mpc(a), _q_of(q), int(n))
    return _finish(value, digits)


def qpoch_inf(a, q, ctl: TruncationControl | None = None) -> PrecisionComplex:
    """``(a;q)_inf`` with relative truncation error below ``ctl.tail_epsilon``."""
    digits = _prepare(a, q)
    ctl = _ctl(ctl, digits)
    with mp.workdps(digits + GUARD_DIGITS):
        value = qpoch_inf_raw(_to_mpc(a), _q_of(q), ctl)
    return _finish(value, digits)


def qpoch_complex_index(a, q, b, ctl: TruncationControl | None = None) -> PrecisionComplex:
    """``(a;q)_b = (a;q)_inf / (q^b a;q)_inf`` with ``q^b = exp(b log q)``, principal log."""
    digits = _prepare(a, q, b)
    ctl = _ctl(ctl, digits)
    with mp.workdps(digits + GUARD_DIGITS):
        qv = _q_of(q)
        bv = _to_mpc(b)
        av = _to_mpc(a)
        n = mpmath.nint(bv.real)
        if bv.imag == 0 and bv.real == n:
            # exact integer index: finite product, valid even where both
            # infinite products vanish
            return _finish(qpoch_n_raw(av, qv, int(n)), digits)
        qb = mpmath.exp(bv * mpmath.log(qv))
        den = qpoch_inf_raw(qb * av, qv, ctl)
        if abs(den) < pole_tolerance():
            raise PoleError("(q^b a; q)_inf vanishes")
        value = qpoch_inf_raw(av, qv, ctl) / den
    return _finish(value, digits)


def qpoch_multi(args, q, b=None, ctl: TruncationControl | None = None) -> PrecisionComplex:
    """``(a_1, ..., a_k; q)_b``; ``b=None`` means the infinite product."""
    args = list(args)
    digits = _prepare(q, b, *args)
    ctl = _ctl(ctl, digits)
    with mp.workdps(digits + GUARD_DIGITS):
        qv = _q_of(q)
        bv = b
        if isinstance(b, (PrecisionComplex, str)):
            bv = _to_mpc(b)
        value = mpc(1)
        for a in args:
            value *= qpoch_index_raw(_to_mpc(a), qv, bv, ctl)
    return _finish(value, digits)


def qpoch_base_inverted(a, q, n: int) -> PrecisionComplex:
    """``(a; q^-1)_n = q^-binom(n,2) (-a)^n (1/a; q)_n``, never forming ``1/q``."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    digits = _prepare(a, q)
    with mp.workdps(digits + GUARD_DIGITS):
        av = _to_mpc(a)
        qv = _q_of(q)
        if n == 0:
            return _finish(mpc(1), digits)
        if av == 0:
            raise ZeroArgumentError("(a; q^-1)_n with a = 0 is excluded")
        value = (-av) ** n * qpoch_n_raw(1 / av, qv, n) / qv ** (n * (n - 1) // 2)
    return _finish(value, digits)


def theta(z, q, ctl: TruncationControl | None = None) -> PrecisionComplex:
    """Modified theta function ``(z, q/z; q)_inf``."""
    digits = _prepare(z, q)
    ctl = _ctl(ctl, digits)
    with mp.workdps(digits + GUARD_DIGITS):
        value = theta_raw(_to_mpc(z), _q_of(q), ctl)
    return _finish(value, digits)


def theta_multi(zs, q, ctl: TruncationControl | None = None) -> PrecisionComplex:
    zs = list(zs)
    digits = _prepare(q, *zs)
    ctl = _ctl(ctl, digits)
    with mp.workdps(digits + GUARD_DIGITS):
        qv = _q_of(q)
        value = mpc(1)
        for z in zs:
            value *= theta_raw(_to_mpc(z), qv, ctl)
    return _finish(value, digits)


def theta_addition_residual(a, c, d, e, q, ctl: TruncationControl | None = None) -> PrecisionComplex:
    """LHS minus RHS of the four-term theta addition formula.

    theta(e, e/c, qa/d, qc/(ad)) - theta(d, d/c, qa/e, qc/(ae))
        = (d/c) theta(a, c/a, e/d, de/c)
    """
    digits = _prepare(a, c, d, e, q)
    ctl = _ctl(ctl, digits)
    with mp.workdps(digits + GUARD_DIGITS):
        a, c, d, e = (_to_mpc(x) for x in (a, c, d, e))
        for x in (a, c, d, e):
            if x == 0:
                raise ZeroArgumentError("theta addition formula needs nonzero arguments")
        qv = _q_of(q)

        def th(*zs):
            out = mpc(1)
            for z in zs:
                out *= theta_raw(z, qv, ctl)
            return out

        lhs = th(e, e / c, qv * a / d, qv * c / (a * d)) - th(d, d / c, qv * a / e, qv * c / (a * e))
        rhs = d / c * th(a, c / a, e / d, d * e / c)
        value = lhs - rhs
    return _finish(value, digits)
