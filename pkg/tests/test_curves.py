import random
from fractions import Fraction

import pytest

from rankjump.curves import (
    IDENTITY,
    EllipticCurveQ,
    OffCurveError,
    SingularCurveError,
    SingularSpecializationError,
    point,
    specialize,
)
from rankjump.polynomial import RatPoly
from rankjump.surfaces import KMFamily, TwistFamily

T = RatPoly.gen()


def rand_point_curve(rng, span=8):
    """A random curve through a random small point (B is solved for)."""
    while True:
        x = Fraction(rng.randint(-span, span), rng.randint(1, 3))
        y = Fraction(rng.randint(1, span), rng.randint(1, 3))
        A = Fraction(rng.randint(-span, span))
        B = y * y - x**3 - A * x
        try:
            return EllipticCurveQ(A, B), point(x, y)
        except SingularCurveError:
            continue


class TestGroupLaw:
    def test_identity(self):
        E = EllipticCurveQ(-36, 0)
        P = point(12, 36)
        assert E.add(P, IDENTITY) == P
        assert E.add(IDENTITY, P) == P

    def test_two_torsion_doubles_to_identity(self):
        E = EllipticCurveQ(-36, 0)
        assert E.add(point(0, 0), point(0, 0)) == IDENTITY

    def test_duplication_example(self):
        # duplication formula for P = (12, 36) on y^2 = x^3 - 36x:
        # x(2P) = (x^4 + 72x^2 + 1296)/(4(x^3 - 36x)) = 25/4, y(2P) = -35/8
        E = EllipticCurveQ(-36, 0)
        assert E.add(point(12, 36), point(12, 36)) == point(Fraction(25, 4), Fraction(-35, 8))

    def test_off_curve_rejected(self):
        E = EllipticCurveQ(-36, 0)
        with pytest.raises(OffCurveError):
            E.add(point(1, 1), point(12, 36))

    def test_commutative_associative(self):
        rng = random.Random(41)
        for _ in range(12):
            E, P = rand_point_curve(rng)
            Q = E.add(P, P)
            R = E.add(Q, P)
            assert E.add(P, Q) == E.add(Q, P)
            assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))

    def test_scalar_mul_matches_repeated_add(self):
        rng = random.Random(42)
        E, P = rand_point_curve(rng)
        acc = IDENTITY
        for n in range(1, 8):
            acc = E.add(acc, P)
            assert E.scalar_mul(n, P) == acc
        assert E.scalar_mul(-3, P) == E.negate(E.scalar_mul(3, P))


class TestTorsion:
    def test_two_torsion(self):
        E = EllipticCurveQ(-36, 0)
        assert E.torsion_order(point(0, 0)) == 2

    def test_nontorsion(self):
        E = EllipticCurveQ(-36, 0)
        assert E.torsion_order(point(12, 36)) is None

    def test_order_six(self):
        E = EllipticCurveQ(0, 1)
        assert E.torsion_order(point(2, 3)) == 6

    def test_order_three(self):
        # (0, m) on y^2 = x^3 + m^2 has order 3
        E = EllipticCurveQ(0, 9)
        assert E.torsion_order(point(0, 3)) == 3


class TestIntegralModel:
    def test_clears_denominators(self):
        E = EllipticCurveQ(Fraction(-9, 64), 0)
        Ai, Bi, lam = E.integral_model()
        assert Ai == -36 and Bi == 0 and lam == 4
        assert Fraction(Ai) == E.A * lam**4

    def test_reduces_large_powers(self):
        E = EllipticCurveQ(-16 * 36, 0)  # = -36 * 2^4
        Ai, _, lam = E.integral_model()
        assert Ai == -36 and lam == Fraction(1, 2)

    def test_irreducible_pair_untouched(self):
        E = EllipticCurveQ(-36, 0)
        Ai, Bi, lam = E.integral_model()
        assert (Ai, Bi, lam) == (-36, 0, 1)


class TestSpecialize:
    def test_twist_example(self):
        s = TwistFamily(T**3 - T, T)
        spec = specialize(s, 6)
        assert spec.curve == EllipticCurveQ(-36, 0)
        assert spec.transport(2, 1) == point(12, 36)

    def test_twist_second_point(self):
        s = TwistFamily(T**3 - T, T)
        spec = specialize(s, 6)
        # fibre relation 6 y^2 = f(3) = 24 gives y = 2
        assert spec.transport(3, 2) == point(18, 72)
        assert point(18, 72).y ** 2 == Fraction(18) ** 3 - 36 * 18

    def test_mordell_example(self):
        m = KMFamily(RatPoly([1]), RatPoly(), RatPoly(), T)
        spec = specialize(m, 3)
        assert spec.curve == EllipticCurveQ(0, 3)
        assert spec.transport(1, 2) == point(1, 2)

    def test_singular_fibre_rejected(self):
        s = TwistFamily(T**3 - T, T)
        with pytest.raises(SingularSpecializationError):
            specialize(s, 0)

    def test_pullback_inverts_transport(self):
        s = TwistFamily(T**3 - T, T)
        spec = specialize(s, 6)
        P = spec.transport(2, 1)
        assert spec.pullback(P) == (2, 1)
        Q = spec.transport(3, 2)
        assert spec.pullback(Q) == (3, 2)

    def test_transport_is_group_homomorphism(self):
        rng = random.Random(43)
        s = TwistFamily(T**3 - T, T)
        checked = 0
        for t0 in (6, 24, Fraction(3, 2), Fraction(2, 3), 15):
            spec = specialize(s, t0)
            fibre_pts = _fibre_points(s, t0, rng)
            for (x1, y1), (x2, y2) in zip(fibre_pts, fibre_pts[1:]):
                P1, P2 = spec.transport(x1, y1), spec.transport(x2, y2)
                fx, fy = _fibre_add(s, t0, (x1, y1), (x2, y2))
                assert spec.transport(fx, fy) == spec.curve.add(P1, P2)
                checked += 1
        assert checked >= 4


def _fibre_points(s, t0, rng, want=3):
    """Rational points on g(t0) y^2 = f(x), found by sweeping x."""
    from rankjump.arith import rational_sqrt

    g0 = s.g(t0)
    out = []
    for num in range(-40, 41):
        for den in (1, 2, 3, 4):
            x = Fraction(num, den)
            val = s.f(x) / g0
            if val == 0:
                continue
            y = rational_sqrt(val)
            if y:
                out.append((x, y))
                if len(out) >= want:
                    return out
    return out


def _fibre_add(s, t0, p1, p2):
    """Chord-tangent addition directly on the fibre model c y^2 = f(x)."""
    c = s.g(t0)
    (x1, y1), (x2, y2) = p1, p2
    if x1 == x2 and y1 == -y2:
        raise ValueError("sum is the identity; pick other points")
    if (x1, y1) == (x2, y2):
        lam = s.f.derivative()(x1) / (2 * c * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    l3 = s.f.leading()
    x3 = c * lam * lam / l3 - (s.f[2] / l3) - x1 - x2
    y3 = -(y1 + lam * (x3 - x1))
    assert c * y3 * y3 == s.f(x3)
    return x3, y3
