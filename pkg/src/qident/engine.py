"""Summation of unilateral and bilateral basic hypergeometric series.

Every series is reduced to the general bilateral shape

    sum_k  w_k * prod_i (a_i;q)_k / prod_j (b_j;q)_k * ((-1)^k q^binom(k,2))^e * z^k

where ``w_k`` is either 1 or the very-well-poised weight ``(1 - a q^{2k})``.
A unilateral series is the case where the denominator list contains ``q``
(so every negative-index term vanishes).  Terms are generated by ratio
recurrences anchored at ``t_0 = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mp, mpc, mpf

from .errors import BudgetError, DivergentSeriesError, PoleError
from .qcore import (
    GUARD_DIGITS,
    MIN_DIGITS,
    PrecisionComplex,
    QBase,
    TruncationControl,
    pole_tolerance,
)

__all__ = [
    "Convergence",
    "SeriesSpec",
    "WellPoisedSpec",
    "SeriesValue",
    "phi_converges",
    "psi_converges",
    "eval_phi",
    "eval_psi",
    "eval_wp_unilateral",
    "eval_wp_bilateral",
    "lattice_exponent",
]


@dataclass(frozen=True)
class Convergence:
    """Outcome of a convergence test.

    ``kind`` is one of ``entire``, ``conditional``, ``terminating``,
    ``convergent`` or ``divergent``.  ``margin`` is the relative slack of the
    tightest strict inequality (``inf`` when nothing constrains the series).
    """

    kind: str
    margin: float = math.inf

    @property
    def ok(self) -> bool:
        return self.kind != "divergent"


@dataclass(frozen=True)
class SeriesValue:
    value: PrecisionComplex
    terms_used: int
    tail_bound: float


def _as_pc(x, digits):
    return x if isinstance(x, PrecisionComplex) else PrecisionComplex(x, digits)


def _digits_of(*items):
    digits = 0
    for x in items:
        if isinstance(x, (PrecisionComplex, QBase)):
            digits = max(digits, x.digits)
        elif isinstance(x, (list, tuple)):
            digits = max(digits, _digits_of(*x))
    return digits


@dataclass(frozen=True)
class SeriesSpec:
    kind: str
    numerator: Sequence = ()
    denominator: Sequence = ()
    q: QBase | None = None
    z: object = 1
    zero_numerators: int = 0
    zero_denominators: int = 0

    def __post_init__(self):
        if self.kind not in ("unilateral", "bilateral"):
            raise ValueError("kind must be 'unilateral' or 'bilateral'")
        if self.zero_numerators < 0 or self.zero_denominators < 0:
            raise ValueError("zero-parameter counts must be nonnegative")
        if self.q is None:
            raise ValueError("a base q is required")
        q = self.q if isinstance(self.q, QBase) else QBase(self.q)
        object.__setattr__(self, "q", q)
        digits = max(_digits_of(self.numerator, self.denominator, self.z), q.digits, MIN_DIGITS)
        object.__setattr__(self, "numerator", tuple(_as_pc(a, digits) for a in self.numerator))
        object.__setattr__(self, "denominator", tuple(_as_pc(b, digits) for b in self.denominator))
        object.__setattr__(self, "z", _as_pc(self.z, digits))
        if self.kind == "bilateral" and self.z.value == 0:
            raise ValueError("bilateral series need z != 0")

    @property
    def digits(self) -> int:
        return max(_digits_of(self.numerator, self.denominator, self.z), self.q.digits)

    @property
    def exponent(self) -> int:
        """Power of ``(-1)^k q^binom(k,2)`` in the general term."""
        r = len(self.numerator) + self.zero_numerators
        s = len(self.denominator) + self.zero_denominators
        return s - r + (1 if self.kind == "unilateral" else 0)


@dataclass(frozen=True)
class WellPoisedSpec:
    """Very-well-poised series ``W^p`` (unilateral) or ``Psi^p`` (bilateral)."""

    a: object
    tail: Sequence = ()
    q: QBase | None = None
    z: object = 1
    p: int = 0

    def __post_init__(self):
        if self.p < 0:
            raise DivergentSeriesError("very-well-poised series with p < 0 diverge")
        if self.q is None:
            raise ValueError("a base q is required")
        q = self.q if isinstance(self.q, QBase) else QBase(self.q)
        object.__setattr__(self, "q", q)
        digits = max(_digits_of(self.a, self.tail, self.z), q.digits, MIN_DIGITS)
        object.__setattr__(self, "a", _as_pc(self.a, digits))
        object.__setattr__(self, "tail", tuple(_as_pc(x, digits) for x in self.tail))
        object.__setattr__(self, "z", _as_pc(self.z, digits))

    @property
    def digits(self) -> int:
        return max(_digits_of(self.a, self.tail, self.z), self.q.digits)


# ---------------------------------------------------------------------------
# lattice detection


def lattice_exponent(x: mpc, q: mpc, tol=None):
    """Integer ``m`` with ``x = q^-m`` within tolerance, else ``None``.

    ``m >= 0`` means ``x`` lies in ``q^{-N_0}``; ``m < 0`` means ``x`` is a
    positive power of ``q``.
    """
    if x == 0:
        return None
    tol = pole_tolerance() if tol is None else tol
    lq = math.log(float(abs(q)))
    ax = abs(x)
    try:
        lx = float(mpmath.log(ax))
    except (ValueError, OverflowError):
        return None
    m = round(-lx / lq)
    if abs(m) > 100_000:
        return None
    if abs(1 - x * q**m) < tol:
        return m
    return None


# ---------------------------------------------------------------------------
# raw convergence classification


def classify_raw(nums, dens, q, z, e, *, unilateral, wp=False):
    """Convergence class of the general series at the current precision.

    ``nums``/``dens`` are the listed parameters (literal zeros allowed),
    ``e`` the quadratic exponent counting every zero parameter.  For a
    unilateral series ``dens`` must not contain the implicit ``q``.  When
    ``wp`` is true the series carries the weight ``1 - a q^{2k}``, which
    acts like an extra numerator/denominator pair of modulus ratio ``q^2``.
    """
    tol = pole_tolerance()
    forward_terminates = any(
        (m := lattice_exponent(a, q, tol)) is not None and m >= 0 for a in nums
    )
    forward_margin = math.inf
    if not forward_terminates:
        if e < 0:
            return Convergence("divergent", 0.0)
        if e == 0:
            forward_margin = 1.0 - float(abs(z))
            if forward_margin <= 0:
                return Convergence("divergent", forward_margin)
    if unilateral:
        if forward_terminates:
            return Convergence("terminating")
        if e > 0:
            return Convergence("entire")
        return Convergence("conditional", forward_margin)

    backward_terminates = any(
        (m := lattice_exponent(b, q, tol)) is not None and m < 0 for b in dens
    )
    backward_margin = math.inf
    if not backward_terminates:
        nonzero_a = [a for a in nums if a != 0]
        nonzero_b = [b for b in dens if b != 0]
        # equals (zero numerators) - (zero denominators), literal or implied
        net = (len(nonzero_b) - len(nonzero_a)) - e
        if net > 0:
            return Convergence("divergent", 0.0)
        if net == 0:
            num = abs(z)
            for a in nonzero_a:
                num *= abs(a)
            den = mpf(1)
            for b in nonzero_b:
                den *= abs(b)
            if wp:
                num *= abs(q) ** 2
            backward_margin = 1.0 - float(den / num)
            if backward_margin <= 0:
                return Convergence("divergent", backward_margin)
    return Convergence("convergent", min(forward_margin, backward_margin))


# ---------------------------------------------------------------------------
# raw summation


class _Stopper:
    """Stopping rule shared by both summation directions."""

    __slots__ = ("eps", "need", "count", "prev", "peak", "tail", "floor")

    def __init__(self, ctl: TruncationControl):
        self.eps = ctl.tail_epsilon
        self.need = ctl.consecutive_small
        self.count = 0
        self.prev = None
        self.peak = mpf(0)
        self.tail = math.inf
        self.floor = mpf(10) ** (-GUARD_DIGITS)

    def done(self, mag, total_mag, settled=True) -> bool:
        if mag > self.peak:
            self.peak = mag
        prev = self.prev
        self.prev = mag
        if prev is None or prev == 0:
            return mag == 0 and prev == 0
        rho = mag / prev
        if rho >= 1 or not settled:
            self.count = 0
            return False
        tail = mag * rho / (1 - rho)
        scale = max(total_mag, self.peak * self.floor)
        if tail <= self.eps * scale:
            self.count += 1
            self.tail = float(tail / scale) if scale else 0.0
            return self.count >= self.need
        self.count = 0
        return False


def sum_raw(nums, dens, q, z, e, ctl: TruncationControl, *, unilateral, wp_a=None):
    """Sum the general series; returns ``(value, terms_used, tail_bound)``.

    For ``unilateral`` the implicit ``(q;q)_k`` is added here.  ``wp_a``
    switches on the weight ``(1 - a q^{2k}) / (1 - a)``.
    """
    tol = pole_tolerance()
    nums = [mpc(a) for a in nums]
    dens = [mpc(b) for b in dens]
    if unilateral:
        dens = dens + [mpc(q)]
    if wp_a is not None:
        one_minus_a = 1 - wp_a
        if abs(one_minus_a) < tol:
            raise PoleError("very-well-poised series with a = 1")
        q2 = q * q

    # forward side: k = 0, 1, 2, ...
    t = mpc(1)
    total = mpc(1) if wp_a is None else one_minus_a
    terms = 1
    qk = mpc(1)
    a2k = wp_a  # a q^{2k}
    stop = _Stopper(ctl)
    stop.done(abs(total), abs(total))
    sign = -1 if e % 2 else 1
    # the stopping rule only engages once every factor 1 - x q^k is close to 1
    big = max([abs(x) for x in nums + dens] + [abs(wp_a) if wp_a is not None else 0, mpf(1)])
    while True:
        num = mpc(1)
        terminated = False
        for a in nums:
            f = 1 - a * qk
            if abs(f) < tol:
                terminated = True
                break
            num *= f
        if terminated:
            break
        den = mpc(1)
        for b in dens:
            f = 1 - b * qk
            if abs(f) < tol:
                raise PoleError("a denominator factor vanishes in the forward direction")
            den *= f
        t = t * num / den * z
        if e:
            t *= sign * qk**e if e > 0 else sign / qk ** (-e)
        qk *= q
        if wp_a is not None:
            a2k *= q2
            term = t * (1 - a2k)
        else:
            term = t
        total += term
        terms += 1
        if stop.done(abs(term), abs(total), abs(qk) * big < 0.5):
            break
        if terms > ctl.max_terms:
            raise BudgetError(f"series needs more than {ctl.max_terms} terms")
    tail = stop.tail if stop.tail != math.inf else 0.0

    if not unilateral:
        # backward side: k = -1, -2, ...
        t = mpc(1)
        qk = mpc(1)  # q^{k} for the current anchor k
        qinv = 1 / q
        a2k = wp_a
        stop = _Stopper(ctl)
        stop.done(abs(total), abs(total))
        back_terms = 0
        zinv = 1 / z
        small = [abs(x) for x in nums + dens if x != 0]
        if wp_a is not None and wp_a != 0:
            small.append(abs(wp_a))
        small = min(small) if small else mpf(1)
        while True:
            qk1 = qk * qinv  # q^{k-1}
            num = mpc(1)
            terminated = False
            for b in dens:
                f = 1 - b * qk1
                if abs(f) < tol:
                    terminated = True
                    break
                num *= f
            if terminated:
                break
            den = mpc(1)
            for a in nums:
                f = 1 - a * qk1
                if abs(f) < tol:
                    raise PoleError("a numerator factor vanishes in the backward direction")
                den *= f
            t = t * num / den * zinv
            if e:
                t *= sign / qk1**e if e > 0 else sign * qk1 ** (-e)
            qk = qk1
            if wp_a is not None:
                a2k /= q2
                term = t * (1 - a2k)
            else:
                term = t
            total += term
            back_terms += 1
            if stop.done(abs(term), abs(total), abs(qk) * small > 2):
                break
            if back_terms > ctl.max_terms:
                raise BudgetError(f"series needs more than {ctl.max_terms} terms")
        terms += back_terms
        if stop.tail != math.inf:
            tail = max(tail, stop.tail)

    if wp_a is not None:
        total /= one_minus_a
    return total, terms, tail


def _check(conv: Convergence, ctl: TruncationControl, what: str):
    if conv.kind == "divergent":
        raise DivergentSeriesError(f"{what} diverges at this point")
    if conv.margin < ctl.min_margin:
        raise DivergentSeriesError(
            f"{what} convergence margin {conv.margin:.3g} is below the floor {ctl.min_margin:g}"
        )


def phi_classify(nums, dens, q, z, zeros: int) -> Convergence:
    e = len(dens) - len(nums) + 1 + zeros
    return classify_raw(nums, dens, q, z, e, unilateral=True)


def psi_classify(nums, dens, q, z, zeros: int) -> Convergence:
    e = len(dens) - len(nums) + zeros
    return classify_raw(nums, dens, q, z, e, unilateral=False)


def _wp_lists(a, tail, q):
    return [a] + list(tail), [q * a / x for x in tail]


def wp_uni_classify(a, tail, q, z, p: int) -> Convergence:
    if p < 0:
        return Convergence("divergent", 0.0)
    nums, dens = _wp_lists(a, tail, q)
    return classify_raw(nums, dens, q, z, p, unilateral=True)


def wp_bi_classify(a, tail, q, z, p: int) -> Convergence:
    if p < 0:
        return Convergence("divergent", 0.0)
    return classify_raw(list(tail), _wp_lists(a, tail, q)[1], q, z, p, unilateral=False, wp=True)


def phi_raw(nums, dens, q, z, zeros: int, ctl):
    """Unilateral ``phi`` with ``zeros`` zero denominators (negative: zero numerators)."""
    e = len(dens) - len(nums) + 1 + zeros
    _check(phi_classify(nums, dens, q, z, zeros), ctl, "phi series")
    return sum_raw(nums, dens, q, z, e, ctl, unilateral=True)


def psi_raw(nums, dens, q, z, zeros: int, ctl):
    """Bilateral ``psi`` with ``zeros`` zero denominators (negative: zero numerators)."""
    if z == 0:
        raise PoleError("bilateral series need z != 0")
    e = len(dens) - len(nums) + zeros
    _check(psi_classify(nums, dens, q, z, zeros), ctl, "psi series")
    return sum_raw(nums, dens, q, z, e, ctl, unilateral=False)


def wp_uni_raw(a, tail, q, z, p: int, ctl):
    if p < 0:
        raise DivergentSeriesError("W series with p < 0 diverge")
    nums, dens = _wp_lists(a, tail, q)
    _check(wp_uni_classify(a, tail, q, z, p), ctl, "W series")
    return sum_raw(nums, dens, q, z, p, ctl, unilateral=True, wp_a=a)


def wp_bi_raw(a, tail, q, z, p: int, ctl):
    if p < 0:
        raise DivergentSeriesError("Psi series with p < 0 diverge")
    if z == 0:
        raise PoleError("bilateral series need z != 0")
    _check(wp_bi_classify(a, tail, q, z, p), ctl, "Psi series")
    return sum_raw(list(tail), _wp_lists(a, tail, q)[1], q, z, p, ctl, unilateral=False, wp_a=a)


# ---------------------------------------------------------------------------
# public API


def _zeros(spec: SeriesSpec) -> int:
    return spec.zero_denominators - spec.zero_numerators


def _raw_lists(spec: SeriesSpec):
    return (
        [x.value for x in spec.numerator],
        [x.value for x in spec.denominator],
        spec.q.q.value,
        spec.z.value,
    )


def phi_converges(spec: SeriesSpec) -> Convergence:
    if spec.kind != "unilateral":
        raise ValueError("phi_converges needs a unilateral spec")
    with mp.workdps(spec.digits + GUARD_DIGITS):
        nums, dens, q, z = _raw_lists(spec)
        return classify_raw(nums, dens, q, z, spec.exponent, unilateral=True)


def psi_converges(spec: SeriesSpec) -> Convergence:
    if spec.kind != "bilateral":
        raise ValueError("psi_converges needs a bilateral spec")
    with mp.workdps(spec.digits + GUARD_DIGITS):
        nums, dens, q, z = _raw_lists(spec)
        return classify_raw(nums, dens, q, z, spec.exponent, unilateral=False)


def _run(fn, digits, ctl, *args):
    ctl = ctl or TruncationControl.for_digits(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        value, terms, tail = fn(*args, ctl)
    return SeriesValue(PrecisionComplex(value, digits), terms, tail)


def eval_phi(spec: SeriesSpec, ctl: TruncationControl | None = None) -> SeriesValue:
    """Sum a unilateral ``r phi s`` (with zero-parameter extension)."""
    if spec.kind != "unilateral":
        raise ValueError("eval_phi needs a unilateral spec")
    with mp.workdps(spec.digits + GUARD_DIGITS):
        args = _raw_lists(spec)
    return _run(phi_raw, spec.digits, ctl, *args, _zeros(spec))


def eval_psi(spec: SeriesSpec, ctl: TruncationControl | None = None) -> SeriesValue:
    """Sum a bilateral ``r psi s`` over all integers ``k``."""
    if spec.kind != "bilateral":
        raise ValueError("eval_psi needs a bilateral spec")
    with mp.workdps(spec.digits + GUARD_DIGITS):
        args = _raw_lists(spec)
    return _run(psi_raw, spec.digits, ctl, *args, _zeros(spec))


def _wp_args(spec: WellPoisedSpec):
    return spec.a.value, [x.value for x in spec.tail], spec.q.q.value, spec.z.value, spec.p


def eval_wp_unilateral(spec: WellPoisedSpec, ctl: TruncationControl | None = None) -> SeriesValue:
    """``W^p(a; tail; q, z)``; the square-root pair enters as ``(1-aq^{2k})/(1-a)``."""
    return _run(wp_uni_raw, spec.digits, ctl, *_wp_args(spec))


def eval_wp_bilateral(spec: WellPoisedSpec, ctl: TruncationControl | None = None) -> SeriesValue:
    """``Psi^p(a; tail; q, z)`` summed over all integers ``k``."""
    return _run(wp_bi_raw, spec.digits, ctl, *_wp_args(spec))
