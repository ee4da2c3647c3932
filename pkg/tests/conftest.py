"""Shared oracles for the test suite.

These are independent of the library code paths they check: brute-force
point searches on conics, exhaustive local non-solvability certificates,
and naive rational enumeration.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


def int_is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def frac_is_square(num: int, den: int) -> bool:
    if num * den < 0:
        return False
    g = gcd(abs(num), abs(den))
    return int_is_square(abs(num) // g) and int_is_square(abs(den) // g)


def brute_force_conic_point(fibre, box: int = 200):
    """Search fibre points (t, w) with |num(t)|, den(t) <= box, w derived.

    Integer arithmetic only; independent of the conic machinery.
    """
    if fibre.kind == "twist":
        g = fibre.surface.g
        g2, g1, g0 = int_pair(g[2]), int_pair(g[1]), int_pair(g[0])
        cn, cd = fibre.value.numerator, fibre.value.denominator
        # common denominator D for the g coefficients
        D = g2[1] * g1[1] * g0[1]
        G2, G1, G0 = (g2[0] * D // g2[1], g1[0] * D // g1[1], g0[0] * D // g0[1])
        for n, d in _box_pairs(box):
            Gval = G2 * n * n + G1 * n * d + G0 * d * d
            if Gval == 0:
                continue
            # w^2 = c / g(t) = (cn * d^2 * D) / (cd * Gval)
            if frac_is_square(cn * d * d * D, cd * Gval):
                return Fraction(n, d)
        return None
    q = fibre.q
    qs = [int_pair(q[i]) for i in range(3)]
    D = qs[0][1] * qs[1][1] * qs[2][1]
    Q0, Q1, Q2 = (qs[0][0] * D // qs[0][1], qs[1][0] * D // qs[1][1], qs[2][0] * D // qs[2][1])
    for n, d in _box_pairs(box):
        val = Q2 * n * n + Q1 * n * d + Q0 * d * d
        # w^2 = q(t) = val / (d^2 * D)
        if val != 0 and frac_is_square(val, d * d * D):
            return Fraction(n, d)
    return None


def int_pair(fr: Fraction) -> tuple[int, int]:
    return fr.numerator, fr.denominator


def _box_pairs(box: int):
    for d in range(1, box + 1):
        for n in range(-box, box + 1):
            if gcd(abs(n), d) == 1:
                yield n, d


def legendre_normalize(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Replace a diagonal form by a solvability-equivalent one with
    squarefree pairwise-coprime coefficients."""
    from sympy import factorint

    def squarefree(n):
        s = 1
        for p, e in factorint(abs(n)).items():
            if e % 2:
                s *= int(p)
        return s if n > 0 else -s

    a, b, c = squarefree(a), squarefree(b), squarefree(c)
    changed = True
    while changed:
        changed = False
        for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            v = [a, b, c]
            g = gcd(abs(v[i]), abs(v[j]))
            if g > 1:
                # divide the form by g and rescale the third variable
                v[i] //= g
                v[j] //= g
                v[k] = squarefree(v[k] * g)
                a, b, c = v
                changed = True
    return a, b, c


def certify_unsolvable(a: int, b: int, c: int, p: int) -> bool:
    """Exhaustively certify that a x^2 + b y^2 + c z^2 = 0 has no nontrivial
    rational zero, given the obstructing place p (0 = real place).

    The form is first normalised to squarefree pairwise-coprime shape. At
    an odd prime exactly one coefficient is divisible by p and a primitive
    solution forces a nontrivial zero of the two unit terms mod p, which is
    excluded by a p^2 sweep (the remaining case is impossible by counting
    valuations). At p = 2 a full primitive sweep mod 32 decides; at the real
    place the signs agree.
    """
    a, b, c = legendre_normalize(a, b, c)
    if p == 0:
        return a > 0 and b > 0 and c > 0 or a < 0 and b < 0 and c < 0
    if p == 2:
        mod = 32
        for x in range(mod):
            for y in range(mod):
                for z in range(mod):
                    if x % 2 == y % 2 == z % 2 == 0:
                        continue
                    if (a * x * x + b * y * y + c * z * z) % mod == 0:
                        return False
        return True
    divisible = [v % p == 0 for v in (a, b, c)]
    if sum(divisible) != 1:
        return False  # p cannot obstruct a unit form at an odd prime
    units = [v for v, dv in zip((a, b, c), divisible) if not dv]
    u1, u2 = units
    for x in range(p):
        for y in range(p):
            if (x, y) != (0, 0) and (u1 * x * x + u2 * y * y) % p == 0:
                return False
    return True
