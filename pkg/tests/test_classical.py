import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from qident import DivergentSeriesError, PoleError
from qident.catalog import default_catalog
from qident.classical import ClassicalSeriesSpec, eval_classical, gamma, gamma_q, rising
from qident.expr import Evaluator
from qident.qcore import GUARD_DIGITS, PrecisionComplex, QBase, TruncationControl

D = 40
M = mpmath.mpmathify


def pc(x, digits=D):
    return PrecisionComplex(x, digits)


def close(x, y, tol=mpf(10) ** -30):
    x = x.value if isinstance(x, PrecisionComplex) else mpc(x)
    y = y.value if isinstance(y, PrecisionComplex) else mpc(y)
    return abs(x - y) <= tol * max(1, abs(x), abs(y))


def series(kind, nums, dens, z=1):
    return eval_classical(ClassicalSeriesSpec(kind, [pc(x) for x in nums], [pc(x) for x in dens], pc(z))).value


# --- gamma -----------------------------------------------------------------------


def test_gamma_examples():
    assert close(gamma(pc(1)), 1)
    assert close(gamma(pc("0.5")), mpmath.sqrt(mpmath.pi))
    z = M("0.3+0.2j")
    assert close(gamma(pc(z + 1)).value / gamma(pc(z)).value, z)


@pytest.mark.parametrize("z", [0, -1, -7])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        gamma(pc(z))


@given(st.floats(-6, 8), st.floats(-5, 5))
def test_gamma_against_mpmath(x, y):
    z = mpc(x, y)
    assume(abs(z - mpmath.nint(x)) > 1e-3 or x > 0.5)
    with mp.workdps(60):
        ref = mpmath.gamma(z)
    assert close(gamma(pc(z)), ref, mpf(10) ** -35)


@pytest.mark.parametrize("digits", [20, 50, 90])
def test_gamma_precision_scales(digits):
    with mp.workdps(digits + 20):
        third = mpf(1) / 3
        ref = mpmath.gamma(third)
        assert close(gamma(pc(third, digits)), ref, mpf(10) ** -(digits - 2))


# --- q-gamma ---------------------------------------------------------------------


def test_gamma_q_examples():
    q = QBase(pc("0.5"))
    assert close(gamma_q(pc(1), q), 1)
    assert close(gamma_q(pc(2), q), 1)


def test_gamma_q_limit_monotone():
    # q = 1 - 10^-5 needs millions of product factors, so the sweep stops at k = 4
    ctl = TruncationControl(tail_epsilon=mpf(10) ** -12, max_terms=1_000_000)
    errors = []
    for k in range(2, 5):
        q = QBase(pc(1 - mpf(10) ** -k, 20))
        errors.append(abs(gamma_q(pc("0.5", 20), q, ctl).value - mpmath.sqrt(mpmath.pi)))
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-4


@given(st.floats(0.1, 3.0), st.floats(0.1, 0.8))
def test_gamma_q_functional_equation(x, qv):
    q = QBase(pc(qv))
    z = mpf(x)
    lhs = gamma_q(pc(z + 1), q).value
    rhs = (1 - mpf(qv) ** z) / (1 - mpf(qv)) * gamma_q(pc(z), q).value
    assert close(lhs, rhs)


def test_gamma_q_pole():
    with pytest.raises(PoleError):
        gamma_q(pc(-2), QBase(pc("0.5")))


# --- rising factorial --------------------------------------------------------------


@given(st.floats(-4, 4), st.floats(-2, 2), st.integers(0, 12), st.integers(0, 12))
def test_rising_splitting(x, y, m, n):
    a = mpc(x, y)
    assert close(rising(a, m + n), rising(a, m) * rising(a + m, n), mpf(10) ** -35)


@given(st.floats(-4, 4), st.floats(0.01, 2), st.integers(1, 15))
def test_rising_negative_index(x, y, n):
    a = mpc(x, y)
    assert close(rising(a, -n) * rising(1 - a, n), (-1) ** n, mpf(10) ** -35)


def test_rising_examples():
    assert rising(3, 0) == 1
    assert rising(3, 2) == 12
    assert close(rising(mpf("0.5"), -1), -2)
    with pytest.raises(PoleError):
        rising(1, -1)


# --- series -------------------------------------------------------------------------


def test_terminating_4f3():
    nums, dens = [-3, M("0.3"), M("1.7+0.2j"), M("2.5")], [M("1.1"), M("0.6"), M("3.2")]
    ref = mpmath.fsum(
        rising(nums[0], k) * rising(nums[1], k) * rising(nums[2], k) * rising(nums[3], k)
        / (rising(dens[0], k) * rising(dens[1], k) * rising(dens[2], k) * mpmath.factorial(k))
        for k in range(4)
    )
    assert close(series("F", nums, dens), ref)


def test_gauss_sum():
    a, b, c = M("0.3"), M("0.45+0.1j"), M("1.9")
    ref = mpmath.gamma(c) * mpmath.gamma(c - a - b) / (mpmath.gamma(c - a) * mpmath.gamma(c - b))
    assert close(series("F", [a, b], [c]), ref, mpf(10) ** -25)


def test_dougall_2h2_sum():
    a, b, c, d = M("0.2"), M("0.35"), M("1.4"), M("1.6")
    g = mpmath.gamma
    ref = g(1 - a) * g(1 - b) * g(c) * g(d) * g(c + d - a - b - 1) / (g(c - a) * g(d - a) * g(c - b) * g(d - b))
    assert close(series("H", [a, b], [c, d]), ref, mpf(10) ** -25)


@given(st.floats(-2, 2), st.floats(0.1, 2), st.floats(0.3, 3))
@settings(max_examples=20)
def test_h_with_unit_denominator_is_f(x, y, c):
    a, b, z = mpc(x, y), mpc(y, x), mpf("0.5")
    h = series("H", [a, b], [1, c], z)
    f = series("F", [a, b], [c], z)
    assert close(h, f)


def test_divergent_h_rejected():
    with pytest.raises(DivergentSeriesError):
        series("H", [M("0.5"), M("0.5")], [M("1.2"), M("0.6")])


# --- Theorem for the bilateral 7H7 -------------------------------------------------

POINT = dict(a="0.1", b="0.2", c="0.3", d="0.25", e="0.15", f="0.2", g="0.1")


def c1_sides(digits=40):
    c1 = default_catalog().get("C1")
    ctl = TruncationControl.for_digits(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        ev = Evaluator(c1.bind({k: mpf(v) for k, v in POINT.items()}, ctl), ctl)
        return [ev(e) for _, e in c1.sides()]


def test_c1_spec_point():
    lhs, rhs = c1_sides()
    assert abs(lhs - rhs) <= mpf(10) ** -20 * abs(lhs)
