"""Independent reference computations built directly on mpmath.

Nothing here imports qident: these are the oracles the package is checked
against.
"""

import mpmath
from mpmath import mpc


def poch(a, q, n):
    """(a;q)_n for integer n by the defining product."""
    a, q = mpc(a), mpc(q)
    if n >= 0:
        out = mpc(1)
        for j in range(n):
            out *= 1 - a * q**j
        return out
    out = mpc(1)
    for j in range(1, -n + 1):
        out *= 1 - a * q ** (-j)
    return 1 / out


def poch_inf(a, q, extra=200):
    """Plain truncated product, with many more factors than needed."""
    a, q = mpc(a), mpc(q)
    n = int(mpmath.mp.dps / max(-mpmath.log10(abs(q)), 1e-3)) + extra
    out = mpc(1)
    for j in range(n):
        out *= 1 - a * q**j
    return out


def theta_sum(z, q, terms=80):
    """Jacobi triple product sum divided by (q;q)_inf, i.e. theta(z;q)."""
    z, q = mpc(z), mpc(q)
    s = mpc(0)
    for k in range(-terms, terms + 1):
        s += (-1) ** k * q ** (k * (k - 1) // 2) * z**k
    return s / mpmath.qp(q, q)


def _general(nums, dens, q, z, k, e):
    q, z = mpc(q), mpc(z)
    t = mpc(1)
    for a in nums:
        t *= poch(a, q, k)
    for b in dens:
        t /= poch(b, q, k)
    return t * ((-1) ** k * q ** (k * (k - 1) // 2)) ** e * z**k


def phi_brute(nums, dens, q, z, zeros=0, terms=400):
    """Unilateral series with its (q;q)_k and zero-parameter exponent."""
    e = len(dens) + zeros - len(nums) + 1
    return mpmath.fsum(_general(nums, dens, q, z, k, e) / poch(q, q, k) for k in range(terms))


def psi_brute(nums, dens, q, z, zeros=0, terms=300):
    e = len(dens) + zeros - len(nums)
    return mpmath.fsum(_general(nums, dens, q, z, k, e) for k in range(-terms, terms + 1))


def wp_factor(a, q, k):
    a, q = mpc(a), mpc(q)
    return (1 - a * q ** (2 * k)) / (1 - a)


def wpuni_brute(a, tail, q, z, p=0, terms=400):
    dens = [q * a / x for x in tail]
    return mpmath.fsum(
        wp_factor(a, q, k) * _general([a] + list(tail), dens, q, z, k, p) / poch(q, q, k)
        for k in range(terms)
    )


def wpbi_brute(a, tail, q, z, p=0, terms=300):
    dens = [q * a / x for x in tail]
    return mpmath.fsum(
        wp_factor(a, q, k) * _general(list(tail), dens, q, z, k, p) for k in range(-terms, terms + 1)
    )
