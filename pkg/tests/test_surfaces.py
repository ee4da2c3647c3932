import random
from fractions import Fraction

import pytest

from rankjump.arith import DomainError
from rankjump.curves import EllipticCurveQ
from rankjump.kodaira import KodairaType, kodaira_type
from rankjump.polynomial import PLACE_AT_INFINITY, Place, RatPoly
from rankjump.surfaces import (
    FibreClassification,
    FibreData,
    InconsistentClassification,
    KMFamily,
    NotApplicableError,
    TwistFamily,
    WeierstrassQt,
    classify_fibres,
    is_twist_case,
    shioda_tate_bound,
    to_chatelet,
    to_weierstrass,
)

T = RatPoly.gen()
F_CUBIC = T**3 - T  # x^3 - x as a coefficient list


def mordell():
    return KMFamily(RatPoly([1]), RatPoly(), RatPoly(), T)


class TestToWeierstrass:
    def test_twist_quadratic_g(self):
        w = to_weierstrass(TwistFamily(F_CUBIC, T**2 - 1))
        assert w.A == -((T**2 - 1) ** 2)
        assert w.B.is_zero()
        assert w.delta == 64 * (T**2 - 1) ** 6

    def test_twist_linear_g(self):
        w = to_weierstrass(TwistFamily(F_CUBIC, T))
        assert w.A == -(T**2) and w.B.is_zero()

    def test_mordell(self):
        w = to_weierstrass(mordell())
        assert w.A.is_zero() and w.B == T
        assert w.delta == -432 * T**2

    def test_nonmonic_cubic_transport_consistency(self):
        # the normalisation must keep surface points on the fibre equation
        f = RatPoly([2, -3, 1, 4])
        s = TwistFamily(f, T)
        w = to_weierstrass(s)
        P, Q, l, c2 = s.short_cubic()
        assert w.A == P * s.g**2 and w.B == Q * s.g**3


class TestClassifyFibres:
    def test_two_i0star(self):
        cls = classify_fibres(to_weierstrass(TwistFamily(F_CUBIC, T**2 - 1)))
        places = {fd.place: fd for fd in cls.fibres}
        assert set(places) == {Place(T - 1), Place(T + 1)}
        assert all(fd.kodaira.symbol == "I0*" for fd in cls.fibres)
        assert all(not fd.reduced for fd in cls.fibres)
        assert cls.euler_total == 12

    def test_linear_g_puts_second_star_at_infinity(self):
        cls = classify_fibres(to_weierstrass(TwistFamily(F_CUBIC, T)))
        places = {fd.place: fd for fd in cls.fibres}
        assert set(places) == {Place(T), PLACE_AT_INFINITY}
        assert all(fd.kodaira.symbol == "I0*" for fd in cls.fibres)

    def test_mordell_types(self):
        cls = classify_fibres(to_weierstrass(mordell()))
        by_place = {fd.place: fd.kodaira.symbol for fd in cls.fibres}
        assert by_place[Place(T)] == "II"
        assert by_place[PLACE_AT_INFINITY] == "II*"
        assert cls.euler_total == 12

    def test_type_iv(self):
        cls = classify_fibres(WeierstrassQt(RatPoly(), T**2))
        by_place = {fd.place: fd.kodaira.symbol for fd in cls.fibres}
        assert by_place[Place(T)] == "IV"

    def test_quadratic_place(self):
        # g = t^2 - 2 is irreducible: one degree-2 place carrying I0*
        cls = classify_fibres(to_weierstrass(TwistFamily(F_CUBIC, T**2 - 2)))
        assert len(cls.fibres) == 1
        fd = cls.fibres[0]
        assert fd.place == Place(T**2 - 2) and fd.place.degree == 2
        assert fd.kodaira.symbol == "I0*"
        assert cls.euler_total == 12

    def test_euler_conservation_random(self):
        rng = random.Random(21)
        count = 0
        while count < 25:
            f = RatPoly([rng.randint(-5, 5) for _ in range(3)] + [rng.choice([1, 2])])
            gdeg = rng.choice([1, 2])
            g = RatPoly([rng.randint(-5, 5) for _ in range(gdeg)] + [rng.choice([1, 3])])
            try:
                s = TwistFamily(f, g)
            except DomainError:
                continue
            cls = classify_fibres(to_weierstrass(s))
            assert cls.euler_total == 12
            nonred = cls.non_reduced()
            # two geometric I0* fibres, possibly conjugate over one place
            assert sum(fd.place.degree for fd in nonred) == 2
            assert all(fd.kodaira.symbol == "I0*" for fd in nonred)
            count += 1

    def test_km_at_most_one_nonreduced_when_not_twist(self):
        rng = random.Random(22)
        count = 0
        while count < 25:
            polys = [RatPoly([rng.randint(-3, 3) for _ in range(3)]) for _ in range(4)]
            try:
                s = KMFamily(*polys) if not polys[0].is_zero() else None
            except DomainError:
                continue
            if s is None:
                continue
            w = to_weierstrass(s)
            if is_twist_case(w) is not None:
                continue
            cls = classify_fibres(w)
            assert cls.euler_total == 12
            geometric_nonreduced = sum(f.place.degree for f in cls.non_reduced())
            assert geometric_nonreduced <= 1
            count += 1


class TestIsTwistCase:
    def test_recover_quadratic(self):
        w = WeierstrassQt(-((T**2 - 1) ** 2), RatPoly())
        s = is_twist_case(w)
        assert s is not None
        assert s.f == RatPoly([0, -1, 0, 1])
        assert s.g == T**2 - 1

    def test_mordell_is_not_twist(self):
        assert is_twist_case(to_weierstrass(mordell())) is None

    def test_direct_match(self):
        s = is_twist_case(WeierstrassQt(2 * T**2, 3 * T**3))
        assert s is not None
        assert s.f == RatPoly([3, 2, 0, 1]) and s.g == T

    def test_roundtrip_random(self):
        rng = random.Random(23)
        count = 0
        while count < 60:
            f = RatPoly(
                [Fraction(rng.randint(-10, 10), rng.randint(1, 10)) for _ in range(3)]
                + [Fraction(rng.choice([i for i in range(-10, 11) if i]), rng.randint(1, 10))]
            )
            gdeg = rng.choice([1, 2])
            g = RatPoly(
                [Fraction(rng.randint(-10, 10), rng.randint(1, 10)) for _ in range(gdeg)]
                + [Fraction(rng.choice([i for i in range(-10, 11) if i]), rng.randint(1, 10))]
            )
            try:
                s = TwistFamily(f, g)
            except DomainError:
                continue
            recovered = is_twist_case(to_weierstrass(s))
            assert recovered is not None
            assert surface_normal_form(s) == surface_normal_form(recovered)
            count += 1


def surface_normal_form(s: TwistFamily):
    """Canonical data of the surface up to admissible rescalings: make g
    monic, absorb its leading coefficient into the cubic, then reduce the
    cubic coefficients by the (u^4, u^6) action."""
    P, Q, _, _ = s.short_cubic()
    lg = s.g.leading()
    Ai, Bi, _ = EllipticCurveQ(P * lg**2, Q * lg**3).integral_model()
    return Ai, Bi, s.g.monic()


class TestChatelet:
    def test_nonsplit(self):
        ch = to_chatelet(TwistFamily(F_CUBIC, T**2 - 2))
        assert ch.a == 2
        assert ch.cubic == F_CUBIC  # w^2 - 2 y^2 = x^3 - x

    def test_split(self):
        assert to_chatelet(TwistFamily(F_CUBIC, T**2 - 1)).a == 1

    def test_complete_square(self):
        ch = to_chatelet(TwistFamily(F_CUBIC, T**2 + 2 * T))
        assert ch.a == 1 and ch.shift == 1  # t -> t - 1 centres g

    def test_linear_g_rejected(self):
        with pytest.raises(NotApplicableError):
            to_chatelet(TwistFamily(F_CUBIC, T))

    def test_maps_preserve_surface_identically(self):
        # w^2 - a Y^2 - F(x) = g2 (g(t) y^2 - f(x)) for all (x, y, t)
        rng = random.Random(24)
        s = TwistFamily(F_CUBIC, 3 * T**2 + T - 2)
        ch = to_chatelet(s)
        g2 = s.g[2]
        for _ in range(40):
            x, y, t = (Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3))
            X, Y, w = ch.forward(x, y, t)
            lhs = w * w - ch.a * Y * Y - ch.cubic(X)
            rhs = g2 * (s.g(t) * y * y - s.f(x))
            assert lhs == rhs
            if Y != 0:
                assert ch.backward(X, Y, w) == (x, y, t)

    def test_maps_carry_rational_points(self):
        from rankjump.conics import conic_fibre, conic_solvable, parametrize, rationals_by_height

        s = TwistFamily(F_CUBIC, T**2 - 1)
        ch = to_chatelet(s)
        checked = 0
        for x0 in rationals_by_height(6):
            if s.f(x0) == 0:
                continue
            fib = conic_fibre(s, x0)
            if not conic_solvable(fib):
                continue
            for t, w in parametrize(fib, 4):
                X, Y, W = ch.forward(x0, w, t)
                assert ch.holds(X, Y, W)
                if Y != 0:
                    assert ch.backward(X, Y, W) == (x0, w, t)
                checked += 1
            if checked > 10:
                break
        assert checked > 10


class TestShiodaTate:
    def test_two_i0star_bound(self):
        cls = classify_fibres(to_weierstrass(TwistFamily(F_CUBIC, T**2 - 1)))
        assert shioda_tate_bound(cls) == 0

    def test_mordell_bound(self):
        cls = classify_fibres(to_weierstrass(mordell()))
        assert shioda_tate_bound(cls) == 0

    def test_twelve_nodal_fibres(self):
        i1 = KodairaType("I1", 1, 1, True)
        fibres = tuple(
            FibreData(Place(T - k), i1) for k in range(12)
        )
        assert shioda_tate_bound(FibreClassification(fibres)) == 8

    def test_euler_check(self):
        i1 = KodairaType("I1", 1, 1, True)
        with pytest.raises(InconsistentClassification):
            shioda_tate_bound(FibreClassification((FibreData(Place(T), i1),)))

    def test_negative_bound_rejected(self):
        # II* + I2 has euler 12 but 9 fibre components beyond the bound's 8
        ii_star = KodairaType("II*", 9, 10, False)
        i2 = KodairaType("I2", 2, 2, True)
        fibres = (FibreData(Place(T), ii_star), FibreData(Place(T - 1), i2))
        with pytest.raises(InconsistentClassification, match="negative"):
            shioda_tate_bound(FibreClassification(fibres))


class TestValidation:
    def test_nonseparable_f(self):
        with pytest.raises(DomainError, match="separable"):
            TwistFamily(T**3, T)

    def test_nonseparable_g(self):
        with pytest.raises(DomainError, match="separable"):
            TwistFamily(F_CUBIC, (T - 1) ** 2)

    def test_constant_km_family(self):
        with pytest.raises(DomainError, match="constant"):
            KMFamily(RatPoly([1]), RatPoly(), RatPoly([-1]), RatPoly([1]))

    def test_singular_km(self):
        with pytest.raises(DomainError):
            KMFamily(RatPoly([1]), RatPoly(), RatPoly(), RatPoly())

    def test_kodaira_table_rejects_nonminimal(self):
        ktype, shift = kodaira_type(4, 6, 12)
        assert shift == 1 and ktype.symbol == "I0"
