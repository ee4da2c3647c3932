"""Exact integer and rational arithmetic helpers.

Everything in this module is computed with integer arithmetic only:
perfect-square tests, squarefree decompositions, Legendre and Hilbert
symbols, and local solvability of diagonal ternary quadratic forms.
Integers arising in this project are values of small cubics at small
rationals, so factoring them is never a bottleneck.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

Rat = Fraction

#: Sentinel used for the real place when reporting local obstructions.
REAL_PLACE = 0


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


def _factorint(n: int) -> dict:
    # sympy import is deferred so that light CLI paths start fast; plain ints
    # only may leave this module
    from sympy import factorint

    return {int(p): int(e) for p, e in factorint(n).items()}


def int_sqrt(n: int):
    """Exact integer square root of n, or None if n is not a perfect square."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def rational_sqrt(q) -> Fraction | None:
    """The non-negative exact square root of q in Q, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    rn = int_sqrt(q.numerator)
    if rn is None:
        return None
    rd = int_sqrt(q.denominator)
    if rd is None:
        return None
    return Fraction(rn, rd)


def is_square(q) -> bool:
    """True iff q is a square in Q (0 counts as a square)."""
    return rational_sqrt(q) is not None


def squarefree_int(n: int) -> tuple[int, int]:
    """Write n = s * w**2 with s a squarefree integer carrying the sign of n.

    Returns (s, w) with w >= 1.
    """
    if n == 0:
        raise DomainError("squarefree decomposition of 0")
    sign = -1 if n < 0 else 1
    s, w = 1, 1
    for p, e in _factorint(abs(n)).items():
        if e % 2:
            s *= p
        w *= p ** (e // 2)
    return sign * s, w


def squarefree_part(q) -> tuple[int, Fraction]:
    """Write a nonzero rational q = s * w**2 with s squarefree and w > 0.

    s is an integer with the sign of q; w is an exact positive rational.
    """
    q = Fraction(q)
    if q == 0:
        raise DomainError("squarefree_part of 0")
    # q = num/den == (num*den)/den^2, so s is the squarefree part of num*den
    s, _ = squarefree_int(q.numerator * q.denominator)
    w = rational_sqrt(q / s)
    assert w is not None and w > 0
    return s, w


def prime_factors(n: int) -> list[int]:
    """Sorted prime divisors of |n| (n nonzero)."""
    if n == 0:
        raise DomainError("prime_factors of 0")
    return sorted(_factorint(abs(n)))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def _val_unit(q: Fraction, p: int) -> tuple[int, Fraction]:
    # q = p^v * u with u a p-adic unit
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, Fraction(num, den)


def _unit_mod(u: Fraction, m: int) -> int:
    # value of a p-adic unit modulo m (m a power of the same p)
    return (u.numerator * pow(u.denominator, -1, m)) % m


def hilbert(a, b, p: int) -> int:
    """Hilbert symbol (a, b)_p at a finite prime p, for nonzero rationals."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol needs nonzero arguments")
    al, u = _val_unit(a, p)
    be, v = _val_unit(b, p)
    if p == 2:
        eps_u = (_unit_mod(u, 8) - 1) // 2 % 2
        eps_v = (_unit_mod(v, 8) - 1) // 2 % 2
        om_u = (_unit_mod(u, 8) ** 2 - 1) // 8 % 2
        om_v = (_unit_mod(v, 8) ** 2 - 1) // 8 % 2
        e = eps_u * eps_v + al * om_v + be * om_u
        return -1 if e % 2 else 1
    s = (p - 1) // 2
    res = (-1) ** (al * be * s % 2)
    lu = legendre(_unit_mod(u, p), p)
    lv = legendre(_unit_mod(v, p), p)
    if be % 2:
        res *= lu
    if al % 2:
        res *= lv
    return res


def hilbert_real(a, b) -> int:
    """Hilbert symbol (a, b) at the real place."""
    return -1 if a < 0 and b < 0 else 1


def ternary_isotropic_at(a, b, c, p: int) -> bool:
    """Whether a*x^2 + b*y^2 + c*z^2 = 0 has a nontrivial zero over Q_p.

    Uses the Hasse-invariant criterion for rank-3 diagonal forms.
    """
    d = Fraction(a) * Fraction(b) * Fraction(c)
    lhs = hilbert(-1, -d, p)
    rhs = hilbert(a, b, p) * hilbert(b, c, p) * hilbert(a, c, p)
    return lhs == rhs


def ternary_obstruction(a, b, c):
    """First local obstruction to a*x^2 + b*y^2 + c*z^2 = 0, or None.

    Arguments are nonzero rationals. Returns REAL_PLACE (= 0) for the real
    place, an obstructing prime otherwise, or None when the form is
    isotropic over every completion (hence over Q, by Hasse-Minkowski).
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0 or b == 0 or c == 0:
        raise DomainError("degenerate ternary form")
    if a > 0 and b > 0 and c > 0 or a < 0 and b < 0 and c < 0:
        return REAL_PLACE
    bad = {2}
    for q in (a, b, c):
        bad.update(prime_factors(q.numerator))
        bad.update(prime_factors(q.denominator))
    for p in sorted(bad):
        if not ternary_isotropic_at(a, b, c, p):
            return p
    return None
