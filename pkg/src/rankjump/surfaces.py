"""Rational elliptic surfaces over Q(t) in twist, quadratic-coefficient and
short Weierstrass form, with singular-fibre classification.

A twist family is g(t) y^2 = f(x) with f a separable cubic and g separable
of degree 1 or 2; its singular fibres form the 2 I0* configuration. A
quadratic-coefficient family is y^2 = a3(t) x^3 + ... + a0(t) with all
deg a_i <= 2. Both convert to a short Weierstrass model y^2 = x^3 + A(t) x
+ B(t) with deg A <= 4, deg B <= 6, the shape that characterises rational
elliptic surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import DomainError
from .kodaira import InvalidModelError, KodairaType, kodaira_type
from .polynomial import (
    PLACE_AT_INFINITY,
    Place,
    RatPoly,
    factor_rational,
    poly_discriminant,
    valuation,
    yun_squarefree,
)


class NotRationalElliptic(ValueError):
    """Raised when degree bounds rule out a rational elliptic surface."""


class NotApplicableError(ValueError):
    """Raised when an operation does not apply to the given surface."""


class InconsistentClassification(ValueError):
    """Raised when fibre data violates the Euler-number accounting."""


def _short_cubic(f: RatPoly) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Normalise a separable cubic f to monic depressed form x^3 + P x + Q.

    Returns (P, Q, l, c2) where l = leading coefficient and c2 the original
    quadratic coefficient; a point (x, y) on g y^2 = f(x) maps to
    (l x + c2/3, l y) on g y^2 = x^3 + P x + Q.
    """
    l = f.leading()
    c2, c1, c0 = f[2], f[1], f[0]
    # scale to monic: multiply the equation by l^2 and set x1 = l x, y1 = l y
    b2, b1, b0 = c2, c1 * l, c0 * l * l
    # depress: x2 = x1 + b2/3
    P = b1 - b2 * b2 / 3
    Q = b0 - b2 * b1 / 3 + 2 * b2**3 / 27
    return P, Q, l, c2


@dataclass(frozen=True)
class TwistFamily:
    """The surface g(t) y^2 = f(x), fibred over the t-line."""

    f: RatPoly
    g: RatPoly

    def __post_init__(self):
        if self.f.degree != 3:
            raise DomainError("f must be a cubic")
        if poly_discriminant(self.f) == 0:
            raise DomainError("f must be separable")
        if self.g.degree not in (1, 2):
            raise DomainError("g must be nonconstant of degree at most 2")
        if self.g.degree == 2 and poly_discriminant(self.g) == 0:
            raise DomainError("g must be separable")

    def short_cubic(self):
        return _short_cubic(self.f)


@dataclass(frozen=True)
class KMFamily:
    """The surface y^2 = a3(t) x^3 + a2(t) x^2 + a1(t) x + a0(t), deg a_i <= 2."""

    a3: RatPoly
    a2: RatPoly
    a1: RatPoly
    a0: RatPoly

    def __post_init__(self):
        for name in ("a3", "a2", "a1", "a0"):
            if getattr(self, name).degree > 2:
                raise DomainError(f"{name} must have degree at most 2")
        if self.a3.is_zero():
            raise DomainError("a3 must be nonzero")
        A, B = self.short_AB()
        if (-16 * (4 * A**3 + 27 * B**2)).is_zero():
            raise DomainError("generic fibre is singular")
        if A.is_constant() and B.is_constant():
            raise DomainError("family is constant")

    def short_AB(self) -> tuple[RatPoly, RatPoly]:
        """Coefficients of the short model y^2 = x^3 + A(t) x + B(t)."""
        a3, a2, a1, a0 = self.a3, self.a2, self.a1, self.a0
        A = a1 * a3 - a2 * a2 * Fraction(1, 3)
        B = a0 * a3 * a3 - a1 * a2 * a3 * Fraction(1, 3) + a2**3 * Fraction(2, 27)
        return A, B

    def fibre_quadratic(self, x0: Fraction) -> RatPoly:
        """The polynomial q(t) with w^2 = q(t) cutting out the curve x = x0."""
        x0 = Fraction(x0)
        return self.a3 * x0**3 + self.a2 * x0**2 + self.a1 * x0 + self.a0


@dataclass(frozen=True)
class WeierstrassQt:
    """Short Weierstrass model y^2 = x^3 + A(t) x + B(t) of a rational
    elliptic surface: deg A <= 4, deg B <= 6 after polynomial rescaling."""

    A: RatPoly
    B: RatPoly
    delta: RatPoly = field(init=False, compare=False)

    def __post_init__(self):
        A, B = self.A, self.B
        delta = -16 * (4 * A**3 + 27 * B**2)
        if delta.is_zero():
            raise InvalidModelError("discriminant vanishes identically")
        if A.degree > 4 or B.degree > 6:
            A, B = _reduce_model(A, B)
            delta = -16 * (4 * A**3 + 27 * B**2)
            object.__setattr__(self, "A", A)
            object.__setattr__(self, "B", B)
        if self.A.degree > 4 or self.B.degree > 6:
            raise NotRationalElliptic(
                "coefficient degrees exceed the rational elliptic surface bounds"
            )
        object.__setattr__(self, "delta", delta)


def _reduce_model(A: RatPoly, B: RatPoly) -> tuple[RatPoly, RatPoly]:
    """Divide out polynomial factors u with u^4 | A and u^6 | B."""
    base = B if A.is_zero() else A if B.is_zero() else None
    if base is None:
        _, factors = factor_rational(A)
        for h, _ in factors:
            va, vb = valuation(A, Place(h)), valuation(B, Place(h))
            k = min(va // 4, vb // 6)
            if k > 0:
                A = A.exact_div(h ** (4 * k))
                B = B.exact_div(h ** (6 * k))
    else:
        n = 4 if base is A else 6
        _, factors = factor_rational(base)
        for h, mult in factors:
            k = mult // n
            if k > 0:
                if not A.is_zero():
                    A = A.exact_div(h ** (4 * k))
                if not B.is_zero():
                    B = B.exact_div(h ** (6 * k))
    return A, B


@dataclass(frozen=True)
class FibreData:
    place: Place
    kodaira: KodairaType

    @property
    def components(self) -> int:
        return self.kodaira.components

    @property
    def reduced(self) -> bool:
        return self.kodaira.reduced

    @property
    def euler(self) -> int:
        return self.kodaira.euler


@dataclass(frozen=True)
class FibreClassification:
    fibres: tuple[FibreData, ...]

    @property
    def euler_total(self) -> int:
        """Sum of local Euler contributions, weighted by place degrees."""
        return sum(f.euler * f.place.degree for f in self.fibres)

    def non_reduced(self) -> list[FibreData]:
        return [f for f in self.fibres if not f.reduced]


def to_weierstrass(surface) -> WeierstrassQt:
    """Short Weierstrass model of a twist or quadratic-coefficient family."""
    if isinstance(surface, TwistFamily):
        P, Q, _, _ = surface.short_cubic()
        g = surface.g
        return WeierstrassQt(P * g * g, Q * g * g * g)
    if isinstance(surface, KMFamily):
        A, B = surface.short_AB()
        return WeierstrassQt(A, B)
    if isinstance(surface, WeierstrassQt):
        return surface
    raise TypeError(f"unsupported surface {surface!r}")


def classify_fibres(w: WeierstrassQt) -> FibreClassification:
    """Kodaira types at every singular place of the model, infinity included.

    Each place is locally minimalised by x -> u^2 x, y -> u^3 y before the
    valuation table is applied; residue characteristic 0 makes the table
    decisive.
    """
    fibres = []
    _, factors = factor_rational(w.delta)
    for h, vd in factors:
        pl = Place(h)
        va, vb = valuation(w.A, pl), valuation(w.B, pl)
        ktype, k = kodaira_type(va, vb, vd)
        if vd - 12 * k > 0:
            fibres.append(FibreData(pl, ktype))
    # the place at infinity, via s = 1/t on the naturally rescaled model
    a_inf = w.A.reversed_to(4)
    b_inf = w.B.reversed_to(6)
    d_inf = w.delta.reversed_to(12)
    s_zero = Place(RatPoly.gen())
    va = valuation(a_inf, s_zero)
    vb = valuation(b_inf, s_zero)
    vd = valuation(d_inf, s_zero)
    ktype, k = kodaira_type(va, vb, vd)
    if vd - 12 * k > 0:
        fibres.append(FibreData(PLACE_AT_INFINITY, ktype))
    return FibreClassification(tuple(fibres))


def shioda_tate_bound(c: FibreClassification) -> int:
    """Upper bound 8 - sum_v (m_v - 1) for the generic Mordell-Weil rank.

    The sum runs over geometric singular fibres, so each place is weighted
    by its degree. Requires the Euler number 12 of a rational elliptic
    surface.
    """
    if c.euler_total != 12:
        raise InconsistentClassification(
            f"Euler number {c.euler_total} != 12; not a rational elliptic surface"
        )
    bound = 8 - sum((f.components - 1) * f.place.degree for f in c.fibres)
    if bound < 0:
        raise InconsistentClassification(f"negative rank bound {bound}")
    return bound


def is_twist_case(w: WeierstrassQt) -> TwistFamily | None:
    """Recover (f, g) when the model is g(t) y^2 = f(x) in disguise.

    Succeeds exactly when the discriminant is c * g^6 for a separable g of
    degree 1 or 2 and A = a g^2, B = b g^3 for constants a, b; then returns
    the twist family with f = x^3 + a x + b and g monic. Returns None
    otherwise.
    """
    _, blocks = yun_squarefree(w.delta)
    if len(blocks) != 1 or blocks[0][1] != 6:
        return None
    g = blocks[0][0]
    if g.degree not in (1, 2):
        return None
    if g.degree == 2 and poly_discriminant(g) == 0:
        return None
    try:
        a_poly = w.A.exact_div(g * g) if not w.A.is_zero() else RatPoly()
        b_poly = w.B.exact_div(g * g * g) if not w.B.is_zero() else RatPoly()
    except DomainError:
        return None
    if not (a_poly.is_constant() and b_poly.is_constant()):
        return None
    a = a_poly[0] if not a_poly.is_zero() else Fraction(0)
    b = b_poly[0] if not b_poly.is_zero() else Fraction(0)
    f = RatPoly([b, a, 0, 1])
    if poly_discriminant(f) == 0:
        return None
    return TwistFamily(f, g)


@dataclass(frozen=True)
class ChateletModel:
    """The model w^2 - a y^2 = F(x) of a twist family with deg g = 2.

    Obtained by centring g (shift removing its linear term) and the
    substitution w = (t + shift) * g2 * y; F = g2 * f.
    """

    a: Fraction
    cubic: RatPoly
    shift: Fraction        # t_centred = t + shift
    g2: Fraction           # leading coefficient of g

    def forward(self, x, y, t):
        """Surface point (x, y, t) with g(t) y^2 = f(x) to (x, Y, w)."""
        x, y, t = Fraction(x), Fraction(y), Fraction(t)
        s = t + self.shift
        Y = self.g2 * y
        return x, Y, s * Y

    def backward(self, x, Y, w):
        """Inverse map; needs Y != 0."""
        x, Y, w = Fraction(x), Fraction(Y), Fraction(w)
        if Y == 0:
            raise DomainError("backward map needs Y != 0")
        s = w / Y
        return x, Y / self.g2, s - self.shift

    def holds(self, x, Y, w) -> bool:
        return w * w - self.a * Y * Y == self.cubic(x)


def to_chatelet(s: TwistFamily) -> ChateletModel:
    """Chatelet form of a twist family; requires deg g = 2."""
    if s.g.degree != 2:
        raise NotApplicableError("Chatelet model needs deg g = 2")
    g2, g1, g0 = s.g[2], s.g[1], s.g[0]
    shift = g1 / (2 * g2)
    a = (g1 * g1 - 4 * g0 * g2) / (4 * g2 * g2)
    return ChateletModel(a=a, cubic=g2 * s.f, shift=shift, g2=g2)
