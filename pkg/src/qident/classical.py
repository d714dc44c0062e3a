"""Ordinary gamma, q-gamma and hypergeometric series at unit argument.

Unit-argument series converge only algebraically, so partial sums are
accelerated with mpmath's Levin u-transform, run at triple precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import mpmath
from mpmath import mp, mpc, mpf

from .engine import SeriesValue, lattice_exponent
from .errors import BudgetError, DivergentSeriesError, PoleError
from .qcore import (
    GUARD_DIGITS,
    MIN_DIGITS,
    PrecisionComplex,
    QBase,
    TruncationControl,
    pole_tolerance,
    qpoch_inf_raw,
)

__all__ = [
    "ClassicalSeriesSpec",
    "gamma",
    "gamma_q",
    "rising",
    "eval_classical",
    "spouge_order",
]


# ---------------------------------------------------------------------------
# Spouge gamma


def spouge_order(digits: int) -> int:
    """Smallest Spouge parameter ``a`` whose error bound beats ``10^-digits``.

    The relative error of the truncated formula is below
    ``a^(-1/2) (2 pi)^-(a + 1/2)``.
    """
    a = 2
    log_target = -digits * math.log(10)
    while -0.5 * math.log(a) - (a + 0.5) * math.log(2 * math.pi) > log_target:
        a += 1
    return a


@lru_cache(maxsize=32)
def _spouge_coefficients(a: int, dps: int):
    with mp.workdps(dps):
        coeffs = [mpmath.sqrt(2 * mpmath.pi)]
        fact = mpf(1)
        for k in range(1, a):
            if k > 1:
                fact *= k - 1
            c = (-1) ** (k - 1) / fact * mpf(a - k) ** (k - mpf(0.5)) * mpmath.exp(a - k)
            coeffs.append(c)
        return tuple(coeffs)


def gamma_raw(z: mpc) -> mpc:
    """Gamma at the current precision (Spouge plus reflection)."""
    z = mpc(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        raise PoleError("gamma has a pole at nonpositive integers")
    nearest = mpmath.nint(z.real)
    if nearest <= 0 and abs(z - nearest) < pole_tolerance():
        raise PoleError("gamma argument is a nonpositive integer within tolerance")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return mpmath.pi / (mpmath.sinpi(z) * gamma_raw(1 - z))
    digits = mp.dps
    a = spouge_order(digits + 2)
    # the alternating coefficient sum loses about a*log10(e) digits
    work = digits + int(a * 0.45) + 10
    coeffs = _spouge_coefficients(a, work)
    with mp.workdps(work):
        x = z - 1
        s = coeffs[0]
        for k in range(1, a):
            s += coeffs[k] / (x + k)
        xa = x + a
        value = mpmath.exp((x + mpf(0.5)) * mpmath.log(xa) - xa) * s
    return +value


def _digits_of(*xs):
    d = [x.digits for x in xs if isinstance(x, (PrecisionComplex, QBase))]
    return max(d) if d else 50


def _value(x):
    if isinstance(x, PrecisionComplex):
        return x.value
    if isinstance(x, QBase):
        return x.q.value
    return mpc(x)


def gamma(z) -> PrecisionComplex:
    """Euler's gamma function at ``z``'s precision."""
    digits = _digits_of(z)
    with mp.workdps(digits + GUARD_DIGITS):
        v = gamma_raw(_value(z))
    return PrecisionComplex(v, digits)


def gamma_q_raw(z: mpc, q: mpc, ctl: TruncationControl) -> mpc:
    logq = mpmath.log(q)
    qz = mpmath.exp(z * logq)
    m = lattice_exponent(qz, q)
    if m is not None and m >= 0:
        raise PoleError("q-gamma pole: q^z lies in q^{-N_0}")
    den = qpoch_inf_raw(qz, q, ctl)
    return qpoch_inf_raw(q, q, ctl) * mpmath.exp((1 - z) * mpmath.log(1 - q)) / den


def gamma_q(z, q, ctl: TruncationControl | None = None) -> PrecisionComplex:
    """``Gamma_q(z) = (q;q)_inf (1-q)^(1-z) / (q^z;q)_inf``, principal branches."""
    digits = _digits_of(z, q)
    ctl = ctl or TruncationControl.for_digits(digits)
    qv = _value(q)
    if not 0 < abs(qv) < 1:
        raise ValueError("base must satisfy 0 < |q| < 1")
    with mp.workdps(digits + GUARD_DIGITS):
        v = gamma_q_raw(_value(z), qv, ctl)
    return PrecisionComplex(v, digits)


def rising(alpha, n: int):
    """Rising factorial ``(alpha)_n`` for any integer ``n``.

    Negative ``n`` uses ``(alpha)_{-m} = (-1)^m / (1 - alpha)_m``.
    """
    alpha = mpc(alpha)
    if n >= 0:
        out = mpc(1)
        for j in range(n):
            out *= alpha + j
        return out
    m = -n
    den = rising(1 - alpha, m)
    if den == 0:
        raise PoleError("(alpha)_n with negative n hits a pole")
    return (-1) ** m / den


# ---------------------------------------------------------------------------
# series


@dataclass(frozen=True)
class ClassicalSeriesSpec:
    """``F``: sum over k >= 0 with ``k!`` in the denominator.  ``H``: sum over all k."""

    kind: str
    numerator: Sequence = ()
    denominator: Sequence = ()
    z: object = 1

    def __post_init__(self):
        if self.kind not in ("F", "H"):
            raise ValueError("kind must be 'F' or 'H'")


def _excess(nums, dens) -> mpf:
    return (sum(dens, mpc(0)) - sum(nums, mpc(0))).real


def _is_nonpos_int(x, tol) -> int | None:
    n = mpmath.nint(x.real)
    if n <= 0 and abs(x - n) < tol:
        return int(-n)
    return None


class _Accumulator:
    """Sum terms produced one by one; accelerate with Levin when slow."""

    def __init__(self, ctl: TruncationControl, accelerate: bool):
        self.ctl = ctl
        self.accelerate = accelerate
        self.partial = []
        self.total = mpc(0)
        self.small = 0

    def run(self, next_term):
        ctl = self.ctl
        eps = ctl.tail_epsilon
        if not self.accelerate:
            n = 0
            prev = None
            while True:
                t = next_term()
                if t is None:
                    return self.total, n, 0.0
                self.total += t
                n += 1
                m = abs(t)
                if m <= eps * abs(self.total) and (prev is None or m <= prev):
                    self.small += 1
                    if self.small >= ctl.consecutive_small:
                        return self.total, n, float(m / abs(self.total)) if self.total else 0.0
                else:
                    self.small = 0
                prev = m
                if n > ctl.max_terms:
                    raise BudgetError("classical series exceeded the term budget")
        with mp.extraprec(2 * mp.prec):
            levin = mpmath.levin(method="levin", variant="u")
            target = eps * mpf(10) ** -5
            n = 0
            best, best_err = None, mpf("inf")
            while True:
                for _ in range(20):
                    t = next_term()
                    if t is None:
                        return self.total, n, 0.0
                    self.total += t
                    self.partial.append(self.total)
                    n += 1
                value, err = levin.update_psum(self.partial)
                scale = max(abs(value), mpf(10) ** (-mp.dps))
                if err < best_err:
                    best, best_err = value, err
                if err <= target * scale:
                    return +value, n, float(err / scale)
                if n > min(ctl.max_terms, 2000):
                    if best_err <= eps * mpf(10) ** 5 * scale:
                        return +best, n, float(best_err / scale)
                    raise BudgetError("Levin acceleration did not reach the requested accuracy")


def classical_raw(kind: str, nums, dens, z, ctl: TruncationControl):
    """Sum ``F`` or ``H`` at the current precision; returns ``(value, terms, tail)``."""
    tol = pole_tolerance()
    nums = [mpc(x) for x in nums]
    dens = [mpc(x) for x in dens]
    z = mpc(z)
    r, s = len(nums), len(dens)
    terminating = any(_is_nonpos_int(a, tol) is not None for a in nums)
    for b in dens:
        nb = _is_nonpos_int(b, tol)
        if nb is not None and not any(
            (na := _is_nonpos_int(a, tol)) is not None and na <= nb for a in nums
        ):
            raise PoleError("a denominator parameter is a nonpositive integer")

    if kind == "F":
        if r > s + 1 and not terminating:
            raise DivergentSeriesError("F series with more than s+1 numerators diverges")
        accelerate = False
        if r == s + 1 and not terminating:
            mz = abs(z)
            if mz > 1:
                raise DivergentSeriesError("F series needs |z| <= 1")
            if mz == 1:
                if _excess(nums, dens) <= 0:
                    raise DivergentSeriesError("F series at |z| = 1 needs Re(sum b - sum a) > 0")
                accelerate = True
            elif mz > 0.75:
                accelerate = True
        state = {"k": 0, "t": mpc(1)}

        def nxt():
            k = state["k"]
            t = state["t"]
            if t == 0:
                return None
            state["k"] = k + 1
            num = mpc(1)
            for a in nums:
                num *= a + k
            den = mpc(k + 1)
            for b in dens:
                den *= b + k
            state["t"] = t * num / den * z
            return t

        return _Accumulator(ctl, accelerate).run(nxt)

    # H series: both directions, each of which may terminate
    if r != s:
        raise DivergentSeriesError("H series needs as many numerator as denominator parameters")
    # a positive integer denominator b kills every term with k <= -b
    backward_terminates = any(
        _is_nonpos_int(1 - b, tol) is not None for b in dens
    )
    mz = abs(z)
    on_circle = abs(mz - 1) <= tol
    if not terminating and mz > 1 + tol:
        raise DivergentSeriesError("H series needs |z| <= 1 unless its forward side terminates")
    if not backward_terminates and mz < 1 - tol:
        raise DivergentSeriesError("H series needs |z| >= 1 unless its backward side terminates")
    if on_circle and _excess(nums, dens) <= 1:
        raise DivergentSeriesError("H series at |z| = 1 needs Re(sum b - sum a) > 1")

    fwd = {"k": 0, "t": mpc(1)}

    def forward():
        k = fwd["k"]
        t = fwd["t"]
        if t == 0:
            return None
        fwd["k"] = k + 1
        num = mpc(1)
        for a in nums:
            num *= a + k
        den = mpc(1)
        for b in dens:
            f = b + k
            if abs(f) < tol:
                raise PoleError("H series denominator vanishes")
            den *= f
        fwd["t"] = t * num / den * z
        return t

    zinv = 1 / z
    bwd = {"n": 0, "t": mpc(1)}

    def backward():
        # t_{-(n+1)} / t_{-n} = prod(1 - b + n) / prod(1 - a + n) / z
        n = bwd["n"]
        t = bwd["t"]
        num = mpc(1)
        for b in dens:
            num *= 1 - b + n
        if num == 0 or abs(num) < tol:
            return None
        den = mpc(1)
        for a in nums:
            f = 1 - a + n
            if abs(f) < tol:
                raise PoleError("H series numerator hits a pole in the negative direction")
            den *= f
        t = t * num / den * zinv
        bwd["n"] = n + 1
        bwd["t"] = t
        return t

    v1, n1, e1 = _Accumulator(ctl, on_circle and not terminating).run(forward)
    v2, n2, e2 = _Accumulator(ctl, on_circle and not backward_terminates).run(backward)
    return v1 + v2, n1 + n2, max(e1, e2)


def eval_classical(spec: ClassicalSeriesSpec, ctl: TruncationControl | None = None) -> SeriesValue:
    """Evaluate an ``F`` or ``H`` series; unit-argument tails use Levin acceleration."""
    items = list(spec.numerator) + list(spec.denominator) + [spec.z]
    digits = max([MIN_DIGITS] + [x.digits for x in items if isinstance(x, PrecisionComplex)])
    if not any(isinstance(x, PrecisionComplex) for x in items):
        digits = 50
    ctl = ctl or TruncationControl.for_digits(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        value, terms, tail = classical_raw(
            spec.kind,
            [_value(x) for x in spec.numerator],
            [_value(x) for x in spec.denominator],
            _value(spec.z),
            ctl,
        )
    return SeriesValue(PrecisionComplex(value, digits), terms, tail)
