"""Conic fibres of the bundle x = x0 on a twist or quadratic-coefficient
surface: branch loci, quadratic-extension classes, exact rational-point
decisions (Hasse-Minkowski) and parametrisation by lines through a base
point.

For a twist family the fibre over x0 is g(t) w^2 = f(x0); substituting
u = t w turns it into a plane conic. For a quadratic-coefficient family it
is w^2 = q(t) with q of degree at most 2, already a conic after
homogenising.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    REAL_PLACE,
    squarefree_part,
    ternary_obstruction,
)
from .polynomial import (
    PLACE_AT_INFINITY,
    Place,
    RatPoly,
    factor_rational,
    squarefree_kernel,
)
from .surfaces import KMFamily, TwistFamily


class DegenerateFibreError(ValueError):
    """Raised for x0 where the curve x = x0 is not an integral conic."""


#: Verdicts of fibre_product_genus.
REDUCIBLE = "reducible"
GENUS_0 = "genus 0"
GENUS_1 = "genus 1"


@dataclass(frozen=True)
class QuadExtClass:
    """The quadratic extension Q(t)(sqrt(s * h(t))), canonically presented:
    s a squarefree integer, h monic squarefree."""

    s: int
    h: RatPoly

    def __repr__(self) -> str:
        return f"sqrt({self.s} * ({self.h!r}))"


def quad_ext_class(scalar, poly: RatPoly) -> QuadExtClass:
    """Canonical class of scalar * poly(t) modulo squares in Q(t)*."""
    scalar = Fraction(scalar)
    if scalar == 0 or poly.is_zero():
        raise DegenerateFibreError("zero does not define a quadratic extension")
    lead, h = squarefree_kernel(poly)
    s, _ = squarefree_part(scalar * lead)
    return QuadExtClass(s, h)


@dataclass(frozen=True)
class BranchLocus:
    """Places of Q(t) under the branch points of a degree-2 cover of P^1."""

    places: frozenset[Place]

    @property
    def geometric_count(self) -> int:
        return sum(p.degree for p in self.places)

    def common_count(self, other: "BranchLocus") -> int:
        return sum(p.degree for p in self.places & other.places)


def branch_locus(cls: QuadExtClass) -> BranchLocus:
    """Branch locus of w^2 = s h(t): the roots of h, plus infinity if deg h
    is odd."""
    places = set()
    _, factors = factor_rational(cls.h)
    for h_i, _ in factors:
        places.add(Place(h_i))
    if cls.h.degree % 2:
        places.add(PLACE_AT_INFINITY)
    return BranchLocus(frozenset(places))


def fibre_product_genus(b1: BranchLocus, b2: BranchLocus) -> str:
    """Geometry of the fibre product of two genus-0 double covers of P^1.

    Two shared branch points give a reducible product, one gives a
    geometrically integral curve of genus 0, none gives genus 1.
    """
    for b in (b1, b2):
        if b.geometric_count != 2:
            raise ValueError("branch locus of a genus-0 double cover has 2 points")
    common = b1.common_count(b2)
    return {2: REDUCIBLE, 1: GENUS_0, 0: GENUS_1}[common]


# ---------------------------------------------------------------------------
# exact linear algebra on 3x3 symmetric matrices


def _bilinear(M, u, v) -> Fraction:
    return sum(u[i] * M[i][j] * v[j] for i in range(3) for j in range(3))


def _diagonalize(M):
    """Basis S (list of three column vectors) with the form diagonal on S."""
    M = [[Fraction(x) for x in row] for row in M]
    S = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]  # columns

    def col(j):
        return [S[r][j] for r in range(3)]

    def add_col(dst, src, lam):
        for r in range(3):
            S[r][dst] += lam * S[r][src]
        for r in range(3):
            M[r][dst] += lam * M[r][src]
        for c in range(3):
            M[dst][c] += lam * M[src][c]

    def swap_col(i, j):
        for r in range(3):
            S[r][i], S[r][j] = S[r][j], S[r][i]
        M[i], M[j] = M[j], M[i]
        for r in range(3):
            M[r][i], M[r][j] = M[r][j], M[r][i]

    for i in range(3):
        if M[i][i] == 0:
            for j in range(i + 1, 3):
                if M[j][j] != 0:
                    swap_col(i, j)
                    break
            else:
                for j in range(i + 1, 3):
                    if M[i][j] != 0:
                        add_col(i, j, Fraction(1))
                        break
        if M[i][i] == 0:
            continue
        for j in range(i + 1, 3):
            if M[i][j] != 0:
                add_col(j, i, -M[i][j] / M[i][i])
    return [M[i][i] for i in range(3)], [col(j) for j in range(3)]


def _primitive(vec):
    """Scale a rational vector to coprime integers with canonical sign."""
    from math import gcd

    den = 1
    for c in vec:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in vec]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    if g:
        ints = [c // g for c in ints]
    for c in ints:
        if c != 0:
            if c < 0:
                ints = [-x for x in ints]
            break
    return tuple(ints)


# ---------------------------------------------------------------------------
# the fibre itself


class ConicFibre:
    """One fibre of the conic bundle, with its extension class and branch
    locus; rational-point machinery is computed lazily and cached."""

    def __init__(self, surface, x0):
        x0 = Fraction(x0)
        self.surface = surface
        self.x0 = x0
        if isinstance(surface, TwistFamily):
            self.kind = "twist"
            value = surface.f(x0)
            if value == 0:
                raise DegenerateFibreError(f"f({x0}) = 0: fibre splits")
            self.value = value
            self.q = None
            self.ext_class = quad_ext_class(value, surface.g)
            g = surface.g
            # in coordinates (u, w, z) with u = t w: g2 u^2 + g1 u w + g0 w^2 = c z^2
            self.matrix = (
                (g[2], g[1] / 2, Fraction(0)),
                (g[1] / 2, g[0], Fraction(0)),
                (Fraction(0), Fraction(0), -value),
            )
        elif isinstance(surface, KMFamily):
            self.kind = "km"
            q = surface.fibre_quadratic(x0)
            if q.is_zero():
                raise DegenerateFibreError(f"fibre polynomial vanishes at x0 = {x0}")
            self.value = None
            self.q = q
            self.ext_class = quad_ext_class(1, q)
            if self.ext_class.h.is_constant():
                raise DegenerateFibreError(
                    f"fibre over x0 = {x0} is a square times a constant: cover splits"
                )
            # in coordinates (T, W, Z) with t = T/Z, w = W/Z: W^2 = q2 T^2 + q1 T Z + q0 Z^2
            self.matrix = (
                (-q[2], Fraction(0), -q[1] / 2),
                (Fraction(0), Fraction(1), Fraction(0)),
                (-q[1] / 2, Fraction(0), -q[0]),
            )
        else:
            raise TypeError(f"unsupported surface {surface!r}")
        self.branch = branch_locus(self.ext_class)
        assert self.branch.geometric_count == 2
        self._diag = None
        self._obstruction = "unknown"
        self._base_point = "unknown"

    # -- geometry ----------------------------------------------------------

    def relation_holds(self, t, w) -> bool:
        """Exact check that (t, w) satisfies the defining fibre relation."""
        t, w = Fraction(t), Fraction(w)
        if self.kind == "twist":
            return self.surface.g(t) * w * w == self.value
        return w * w == self.q(t)

    def surface_point(self, t, w):
        """The surface point (x, y) on the fibre over t carried by (t, w)."""
        return self.x0, Fraction(w)

    def _form(self, v) -> Fraction:
        return _bilinear(self.matrix, v, v)

    def _to_affine(self, pt):
        """Projective conic point to an affine fibre point (t, w), or None."""
        a, b, c = (Fraction(x) for x in pt)
        if self.kind == "twist":
            if b == 0 or c == 0:
                return None
            return a / b, b / c
        if c == 0:
            return None
        return a / c, b / c

    # -- solvability -------------------------------------------------------

    def _diagonal(self):
        if self._diag is None:
            diag, basis = _diagonalize(self.matrix)
            if any(d == 0 for d in diag):
                raise DegenerateFibreError("fibre conic is degenerate")
            self._diag = (diag, basis)
        return self._diag

    def local_obstruction(self):
        """None when the fibre has a rational point; otherwise the smallest
        obstructing place (a prime, or 0 for the real place)."""
        if self._obstruction == "unknown":
            diag, _ = self._diagonal()
            self._obstruction = ternary_obstruction(*diag)
        return self._obstruction

    def base_point(self):
        """A primitive projective rational point, or None if unsolvable."""
        if self._base_point != "unknown":
            return self._base_point
        pt = None
        if self._form((1, 0, 0)) == 0:
            # the natural point at infinity; gives the cleanest streams
            pt = (1, 0, 0)
        if pt is None and self.local_obstruction() is not None:
            self._base_point = None
            return None
        if pt is None:
            pt = self._naive_search(32)
        if pt is None:
            pt = self._naive_projective(24)
        if pt is None:
            pt = self._descend()
        if pt is None:
            pt = self._naive_search(200)
        if pt is None:
            raise RuntimeError(
                f"no point found on a locally solvable conic (x0 = {self.x0})"
            )
        pt = _primitive(pt)
        assert self._form(pt) == 0 and any(pt)
        self._base_point = pt
        return pt

    def _from_affine(self, t, w):
        t, w = Fraction(t), Fraction(w)
        if self.kind == "twist":
            return (t * w, w, Fraction(1))
        return (t, w, Fraction(1))

    def _naive_search(self, height):
        """Affine sweep: for small t, test whether the fibre value is a square."""
        from .arith import rational_sqrt

        for t in rationals_by_height(height):
            if self.kind == "twist":
                gt = self.surface.g(t)
                if gt == 0:
                    continue
                w2 = self.value / gt
            else:
                w2 = self.q(t)
                if w2 == 0:
                    continue
            w = rational_sqrt(w2)
            if w is not None and w != 0:
                return self._from_affine(t, w)
        return None

    def _naive_projective(self, height):
        for a in range(-height, height + 1):
            for b in range(0, height + 1):
                for c in range(0, height + 1):
                    if (a, b, c) != (0, 0, 0) and self._form((a, b, c)) == 0:
                        return (a, b, c)
        return None

    def _descend(self):
        """Solve the diagonalised form with sympy's descent, map the point back."""
        from sympy import symbols
        from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic

        diag, basis = self._diagonal()
        sq = []
        for d in diag:
            s, wpart = squarefree_part(d)
            sq.append((s, wpart))
        X, Y, Z = symbols("X Y Z", integer=True)
        expr = sq[0][0] * X**2 + sq[1][0] * Y**2 + sq[2][0] * Z**2
        sol = diop_ternary_quadratic(expr)
        if sol is None or sol == (None, None, None):
            return None
        ys = [Fraction(int(sol[i])) / sq[i][1] for i in range(3)]
        pt = [sum(basis[j][r] * ys[j] for j in range(3)) for r in range(3)]
        if all(c == 0 for c in pt):
            return None
        assert self._form(pt) == 0
        return tuple(pt)


def conic_fibre(surface, x0) -> ConicFibre:
    """The conic fibre x = x0; raises DegenerateFibreError off the bundle."""
    return ConicFibre(surface, x0)


def conic_solvable(fibre: ConicFibre) -> bool:
    """Exact rational-point decision via local solvability at every place."""
    return fibre.local_obstruction() is None


def same_extension(c1: ConicFibre, c2: ConicFibre) -> bool:
    """Whether two fibres define the same quadratic extension of Q(t)."""
    return c1.ext_class == c2.ext_class


def parametrize(fibre: ConicFibre, height_bound: int):
    """All fibre points (t, w) whose line parameter has height <= the bound.

    Points come from the pencil of lines through a fixed base point; each
    emitted pair satisfies the defining relation exactly, in order of the
    parameter height. Requires a solvable fibre.
    """
    for _, t, w in parametrize_heights(fibre, height_bound):
        yield t, w


def parametrize_heights(fibre: ConicFibre, height_bound: int):
    """Like parametrize, but yields (parameter height, t, w)."""
    if not conic_solvable(fibre):
        raise ValueError(f"fibre over x0 = {fibre.x0} has no rational point")
    base = fibre.base_point()
    anchor = next(i for i in range(3) if base[i] != 0)
    axes = [i for i in range(3) if i != anchor]
    M = fibre.matrix
    seen = set()
    for m0, m1 in _parameter_pairs(height_bound):
        v = [0, 0, 0]
        v[axes[0]], v[axes[1]] = m0, m1
        vv = _bilinear(M, v, v)
        bv = _bilinear(M, base, v)
        pt = tuple(vv * base[r] - 2 * bv * v[r] for r in range(3))
        if not any(pt):
            continue
        pt = _primitive(pt)
        if pt in seen:
            continue
        seen.add(pt)
        affine = fibre._to_affine(pt)
        if affine is None:
            continue
        t, w = affine
        assert fibre.relation_holds(t, w)
        yield max(abs(m0), abs(m1)), t, w


def _parameter_pairs(height_bound: int):
    """Projective parameters (m0 : m1), canonical representatives, ordered by
    height, then |m0|, then sign."""
    yield 1, 0
    for h in range(1, height_bound + 1):
        pairs = []
        for m0 in range(-h, h + 1):
            for m1 in range(1, h + 1):
                if max(abs(m0), m1) == h and _coprime(m0, m1):
                    pairs.append((m0, m1))
        pairs.sort(key=lambda p: (abs(p[0]), 0 if p[0] >= 0 else 1, p[1]))
        yield from pairs


def _coprime(a: int, b: int) -> bool:
    from math import gcd

    return gcd(a, b) == 1


def rationals_by_height(bound: int):
    """0, then all nonzero rationals of naive height <= bound, ordered by
    height, then |numerator|, then sign, then denominator."""
    yield Fraction(0)
    for h in range(1, bound + 1):
        batch = []
        for num in range(-h, h + 1):
            for den in range(1, h + 1):
                if max(abs(num), den) == h and _coprime(num, den):
                    batch.append(Fraction(num, den))
        batch.sort(key=lambda r: (abs(r.numerator), 0 if r >= 0 else 1, r.denominator))
        yield from batch
