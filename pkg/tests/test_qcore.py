import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from mpmath import mpc, mpf

from qident import PoleError, ZeroArgumentError
from qident.qcore import (
    PrecisionComplex,
    QBase,
    TruncationControl,
    qpoch_base_inverted,
    qpoch_complex_index,
    qpoch_inf,
    qpoch_multi,
    qpoch_n,
    theta,
    theta_addition_residual,
    theta_multi,
)

from oracle import poch, poch_inf, theta_sum

D = 40


def pc(x, digits=D):
    return PrecisionComplex(x, digits)


def close(x, y, tol=mpf(10) ** -30):
    x = x.value if isinstance(x, PrecisionComplex) else mpc(x)
    y = y.value if isinstance(y, PrecisionComplex) else mpc(y)
    return abs(x - y) <= tol * max(1, abs(x), abs(y))


moduli = st.floats(0.2, 2.0)
phases = st.floats(-3.1, 3.1)
qmods = st.floats(0.05, 0.7)


@st.composite
def cnum(draw, lo=0.2, hi=2.0):
    return mpmath.rect(draw(st.floats(lo, hi)), draw(phases))


@st.composite
def qbase(draw):
    return mpmath.rect(draw(qmods), draw(phases))


# --- types ------------------------------------------------------------------


def test_precision_complex_rejects_low_precision():
    with pytest.raises(ValueError):
        PrecisionComplex(1, 10)


def test_mixed_precision_arithmetic_uses_larger():
    assert (pc(1, 20) + pc(2, 50)).digits == 50


@pytest.mark.parametrize("q", [0, 1, 1.5, -1, 1j])
def test_qbase_requires_unit_disc(q):
    with pytest.raises(ValueError):
        QBase(q)


def test_truncation_control_invariants():
    with pytest.raises(ValueError):
        TruncationControl(tail_epsilon=mpf(0))
    with pytest.raises(ValueError):
        TruncationControl(tail_epsilon=mpf("1e-30"), max_terms=10)
    with pytest.raises(ValueError):
        TruncationControl(tail_epsilon=mpf("1e-30"), consecutive_small=1)
    assert TruncationControl.for_digits(30).tail_epsilon <= mpf(10) ** -30


# --- qpoch_n ----------------------------------------------------------------


def test_qpoch_n_zero_index_is_one():
    assert qpoch_n(pc("0.3+0.2j"), QBase(pc("0.4")), 0).value == 1


def test_qpoch_n_small_examples():
    assert close(qpoch_n(pc(0.5), QBase(pc(0.5)), 2), mpf("0.375"))
    # oracle: 1/(1 - a q^-1) = 1/(1 - 4)
    assert close(qpoch_n(pc(2), QBase(pc(0.5)), -1), mpf(-1) / 3)


def test_qpoch_n_negative_pole():
    with pytest.raises(PoleError):
        qpoch_n(pc(0.25), QBase(pc(0.5)), -3)


@given(cnum(), qbase(), st.integers(0, 25))
def test_qpoch_n_matches_product(a, q, n):
    assert close(qpoch_n(pc(a), QBase(pc(q)), n), poch(a, q, n))


@given(cnum(), qbase(), st.integers(1, 20))
def test_negative_index_identity(a, q, n):
    # (a;q)_{-n} = q^{binom(n+1,2)} (-a)^{-n} / (q/a;q)_n
    assume(all(abs(1 - a / q**j) > 1e-6 for j in range(1, n + 1)))
    with mpmath.workdps(60):
        rhs = q ** (n * (n + 1) // 2) * (-a) ** (-n) / poch(q / a, q, n)
    assert close(qpoch_n(pc(a), QBase(pc(q)), -n), rhs, mpf(10) ** -28)


@given(cnum(), qbase(), st.integers(0, 15), st.integers(0, 15))
def test_splitting(a, q, m, n):
    qb = QBase(pc(q))
    lhs = qpoch_n(pc(a), qb, m + n)
    rhs = qpoch_n(pc(a), qb, m) * qpoch_n(pc(a * q**m), qb, n)
    assert close(lhs, rhs)


# --- qpoch_inf --------------------------------------------------------------


def test_qpoch_inf_trivial_values():
    qb = QBase(pc(0.5))
    assert qpoch_inf(pc(0), qb).value == 1
    assert abs(qpoch_inf(pc(2), qb).value) < mpf(10) ** -35


def test_qpoch_inf_against_long_product():
    with mpmath.workdps(2 * D):
        ref = poch_inf(0.5, 0.5)
    assert close(qpoch_inf(pc(0.5), QBase(pc(0.5))), ref, mpf(10) ** -38)


@given(cnum(0.05, 2.0), qbase())
def test_qpoch_inf_against_mpmath(a, q):
    with mpmath.workdps(60):
        ref = mpmath.qp(a, q)
    assert close(qpoch_inf(pc(a), QBase(pc(q))), ref, mpf(10) ** -35)


@given(cnum(0.05, 2.0), qbase(), st.integers(0, 20))
def test_infinite_finite_consistency(a, q, n):
    qb = QBase(pc(q))
    lhs = qpoch_n(pc(a), qb, n) * qpoch_inf(pc(a * q**n), qb)
    assert close(lhs, qpoch_inf(pc(a), qb))


def test_budget_error_on_tiny_budget():
    from qident import BudgetError

    ctl = TruncationControl(tail_epsilon=mpf(10) ** -40, max_terms=64)
    with pytest.raises(BudgetError):
        qpoch_inf(pc(0.5), QBase(pc("0.999")), ctl)


# --- complex index, multi, base inversion -----------------------------------


def test_complex_index_examples():
    qb = QBase(pc(0.5))
    assert close(qpoch_complex_index(pc("0.3+0.1j"), qb, pc(0)), 1)
    assert close(qpoch_complex_index(pc(0.5), qb, pc(2)), qpoch_n(pc(0.5), qb, 2))
    assert close(qpoch_complex_index(pc(2), qb, pc(-1)), mpf(-1) / 3)


@given(cnum(), qbase(), st.integers(-6, 12))
def test_complex_index_agrees_with_integer_index(a, q, n):
    qb = QBase(pc(q))
    try:
        ref = qpoch_n(pc(a), qb, n)
    except PoleError:
        return
    assert close(qpoch_complex_index(pc(a), qb, pc(n)), ref, mpf(10) ** -28)


def test_complex_index_pole():
    with pytest.raises(PoleError):
        qpoch_complex_index(pc(0.25), QBase(pc(0.5)), pc(-2))


def test_qpoch_multi_examples():
    qb = QBase(pc(0.5))
    assert qpoch_multi([], qb).value == 1
    assert close(qpoch_multi([pc(0.5), pc(0.25)], qb, 1), mpf("0.375"))


@given(cnum(0.2, 1.2), qbase())
def test_square_identity(a, q):
    # (a^2;q)_inf = (a, -a, q^(1/2) a, -q^(1/2) a; q)_inf, principal root
    qb = QBase(pc(q))
    r = mpmath.sqrt(q)
    lhs = qpoch_multi([pc(a), pc(-a), pc(r * a), pc(-r * a)], qb)
    assert close(lhs, qpoch_inf(pc(a * a), qb))


def test_base_inverted_examples():
    qb = QBase(pc(0.5))
    assert qpoch_base_inverted(pc(2), qb, 0).value == 1
    assert close(qpoch_base_inverted(pc(2), qb, 1), -1)
    assert close(qpoch_base_inverted(pc(2), qb, 2), 3)
    with pytest.raises(ZeroArgumentError):
        qpoch_base_inverted(pc(0), qb, 2)


@given(cnum(), qbase(), st.integers(0, 12))
def test_base_inverted_matches_direct_product(a, q, n):
    with mpmath.workdps(80):
        ref = poch(a, 1 / mpc(q), n)
    assert close(qpoch_base_inverted(pc(a), QBase(pc(q)), n), ref, mpf(10) ** -25)


@pytest.mark.parametrize("m", range(2, 9))
def test_critical_limit(m):
    # a^n (x/a;q)_n -> q^binom(n,2) (-x)^n with error O(a)
    a = mpf(10) ** -m
    x, q, n = mpmath.mpmathify("0.7+0.2j"), mpf("0.4"), 5
    lhs = a**n * qpoch_n(pc(x / a), QBase(pc(q)), n).value
    rhs = q ** (n * (n - 1) // 2) * (-x) ** n
    assert abs(lhs - rhs) <= 10 * a


# --- theta ------------------------------------------------------------------


def test_theta_vanishes_on_q_powers():
    qb = QBase(pc("0.4"))
    assert abs(theta(pc("0.4"), qb).value) < mpf(10) ** -35
    assert abs(theta_multi([pc("0.4"), pc("0.3")], qb).value) < mpf(10) ** -35
    assert theta_multi([], qb).value == 1


def test_theta_zero_argument():
    with pytest.raises(ZeroArgumentError):
        theta(pc(0), QBase(pc("0.4")))


def test_theta_quasi_periodicity_example():
    a, q = pc("0.3+0.1j"), QBase(pc("0.4"))
    assert close(theta(pc(q.q.value * a.value), q), -theta(a, q).value / a.value)


@given(cnum(), qbase())
def test_theta_symmetry_and_pairs(z, q):
    qb = QBase(pc(q))
    t = theta(pc(z), qb)
    assert close(theta(pc(q / z), qb), t)
    assert close(theta_multi([pc(z), pc(q / z)], qb), t.value**2)


@given(cnum(0.5, 1.5), st.floats(0.05, 0.5), phases)
def test_triple_product(z, qm, ph):
    q = mpmath.rect(qm, ph)
    with mpmath.workdps(60):
        ref = theta_sum(z, q)
    assert close(theta(pc(z), QBase(pc(q))), ref, mpf(10) ** -28)


def test_theta_addition_examples():
    q = QBase(pc("0.4"))
    assert abs(theta_addition_residual(pc("0.7"), pc("0.3"), pc("0.5"), pc("0.9"), q).value) < mpf(10) ** -38
    assert abs(theta_addition_residual(pc(0.7), pc("0.3"), pc(0.5), pc(0.5), q).value) < mpf(10) ** -38
    assert abs(theta_addition_residual(pc(0.7), pc(0.7), pc(0.5), pc(0.9), q).value) < mpf(10) ** -38


@given(cnum(), cnum(), cnum(), cnum(), qbase())
def test_theta_addition_random(a, c, d, e, q):
    r = theta_addition_residual(pc(a), pc(c), pc(d), pc(e), QBase(pc(q))).value
    qb = QBase(pc(q))
    scale = abs(theta_multi([pc(e), pc(e / c), pc(q * a / d), pc(q * c / (a * d))], qb).value)
    assert abs(r) <= mpf(10) ** -30 * max(1, scale)
