import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rankjump.arith import (
    DomainError,
    hilbert,
    hilbert_real,
    is_square,
    rational_sqrt,
    squarefree_part,
    ternary_isotropic_at,
    ternary_obstruction,
)


class TestSquarefreePart:
    def test_basic(self):
        assert squarefree_part(12) == (3, 2)

    def test_sign(self):
        assert squarefree_part(-1) == (-1, 1)

    def test_product_of_cubic_values(self):
        # 144 = 6 * 24, the values of x^3 - x at 2 and 3
        assert squarefree_part(144) == (1, 12)

    def test_rational(self):
        s, w = squarefree_part(Fraction(8, 27))
        assert s == 6 and s * w * w == Fraction(8, 27)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            squarefree_part(0)

    @given(st.fractions(min_value=Fraction(-4000), max_value=Fraction(4000),
                        max_denominator=500).filter(lambda q: q != 0))
    def test_recomposition(self, q):
        s, w = squarefree_part(q)
        assert w > 0
        assert s * w * w == q


class TestIsSquare:
    def test_examples(self):
        assert is_square(144) and rational_sqrt(144) == 12
        assert not is_square(6)
        assert rational_sqrt(Fraction(36, 25)) == Fraction(6, 5)

    def test_zero_and_negative(self):
        assert is_square(0)
        assert not is_square(-4)

    @given(st.fractions(max_denominator=100, min_value=0, max_value=1000))
    def test_square_roundtrip(self, q):
        assert rational_sqrt(q * q) == abs(q)


class TestHilbertSymbol:
    PRIMES = [2, 3, 5, 7, 11, 13, 17]

    def test_known_values(self):
        assert hilbert(-1, -1, 3) == 1      # units at an odd prime
        assert hilbert(-1, -1, 2) == -1     # -x^2 - y^2 = z^2 is 2-adically trivial
        assert hilbert(2, 3, 5) == 1
        assert hilbert(3, 5, 5) == legendre_value(3, 5)
        assert hilbert(5, 5, 5) == legendre_value(-1, 5)

    def test_product_formula(self):
        rng = random.Random(11)
        for _ in range(60):
            a = rng.choice([-1, 1]) * rng.randint(1, 60)
            b = rng.choice([-1, 1]) * rng.randint(1, 60)
            places = {2} | set(prime_divisors(a)) | set(prime_divisors(b))
            prod = hilbert_real(a, b)
            for p in places:
                prod *= hilbert(a, b, p)
            assert prod == 1

    def test_multiplicativity(self):
        rng = random.Random(12)
        for _ in range(40):
            a, b, c = (rng.choice([-1, 1]) * rng.randint(1, 40) for _ in range(3))
            for p in self.PRIMES:
                assert hilbert(a * b, c, p) == hilbert(a, c, p) * hilbert(b, c, p)


def legendre_value(a, p):
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def prime_divisors(n):
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class TestTernaryForms:
    def test_known_obstruction(self):
        # u^2 - 2 w^2 = 6 z^2 fails 3-adically (and, by reciprocity, also
        # 2-adically; the reported obstruction is the smallest place)
        assert ternary_obstruction(1, -2, -6) == 2
        assert not ternary_isotropic_at(1, -2, -6, 3)
        assert not ternary_isotropic_at(1, -2, -6, 2)

    def test_solvable(self):
        assert ternary_obstruction(1, -2, -2) is None
        assert ternary_obstruction(1, 1, -1) is None

    def test_real_obstruction(self):
        assert ternary_obstruction(1, 2, 3) == 0

    def test_against_brute_force(self):
        rng = random.Random(13)
        for _ in range(40):
            a, b, c = (rng.choice([-1, 1]) * rng.randint(1, 30) for _ in range(3))
            obstruction = ternary_obstruction(a, b, c)
            found = brute_force_zero(a, b, c, 40)
            if found:
                assert obstruction is None, (a, b, c, found)


def brute_force_zero(a, b, c, box):
    from math import isqrt

    for x in range(box):
        for y in range(-box, box):
            rhs = -(a * x * x + b * y * y)
            if c == 0:
                continue
            if rhs % c == 0 and rhs // c >= 0:
                z = isqrt(rhs // c)
                if z * z == rhs // c and (x, y, z) != (0, 0, 0):
                    return (x, y, z)
    return None
