"""Search procedures producing certified rank-jump fibres.

jump1 walks the conic fibres x = x0 in height order, parametrises their
rational points, specialises each parameter value and keeps the fibres
where the transported point has infinite order: one certified extra point.

jump2 produces two independent points over one parameter value. For twist
families every fibre of the bundle shares its branch points, so pairs of
fibres in the same quadratic-extension class are coupled through the shared
square value instead: a point on one fibre transfers to its partner over
the same t0, and the regulator decides independence. For
quadratic-coefficient families the branch points move, so two fibre
parametrisations are intersected on the t-coordinate; pairs whose covers
have identical branch loci (reducible fibre product) are skipped.

avoid_covers filters any certificate stream through a finite challenge of
quadratic covers, keeping only parameter values outside every cover's
image. field_census counts the quadratic-extension classes realised by
solvable fibres.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import is_square, rational_sqrt
from .conics import (
    REDUCIBLE,
    ConicFibre,
    DegenerateFibreError,
    QuadExtClass,
    conic_fibre,
    conic_solvable,
    fibre_product_genus,
    parametrize,
    parametrize_heights,
    rationals_by_height,
)
from .curves import (
    PointQ,
    RegulatorResult,
    SingularSpecializationError,
    regulator,
    specialize,
)
from .polynomial import RatPoly, poly_gcd
from .surfaces import (
    KMFamily,
    TwistFamily,
    classify_fibres,
    shioda_tate_bound,
    to_weierstrass,
)


@dataclass(frozen=True)
class Budget:
    """Search limits: fibre height, parametrisation height, certificate count."""

    x0_height: int = 20
    param_height: int = 16
    count: int = 100


@dataclass(frozen=True)
class CoverChallenge:
    """A finite list of quadratic covers y^2 = h_i(t) of the t-line."""

    covers: tuple[RatPoly, ...]

    def __post_init__(self):
        for h in self.covers:
            if h.is_constant():
                raise ValueError("covers must be nonconstant")
            if poly_gcd(h, h.derivative()).degree > 0:
                raise ValueError(f"cover polynomial {h!r} is not squarefree")

    def admits(self, t0) -> bool:
        """True iff t0 avoids the image of every cover, i.e. no h_i(t0) is a
        square (values 0 lie under a branch point, hence in the image)."""
        return all(not is_square(h(t0)) for h in self.covers)


@dataclass
class RankJumpCertificate:
    """A fibre parameter with points and the evidence for a rank lower bound."""

    label: str
    t0: Fraction
    curve: tuple[Fraction, Fraction]            # (A, B) of the specialised curve
    points: list[tuple[Fraction, Fraction]]
    provenance: list[Fraction]                  # fibre parameter x0 per point
    generic_rank_bound: int
    rank_bound_exact: bool
    claimed_rank_lower_bound: int
    regulator: tuple[float, float] | None = None   # (determinant, error) for pairs


@dataclass
class SearchLog:
    """Side information accumulated by a search run."""

    fibres_tried: int = 0
    degenerate_fibres: int = 0
    unsolvable_fibres: int = 0
    torsion_rejects: int = 0
    dependent_pairs: int = 0
    inconclusive_pairs: int = 0
    avoided_t0: int = 0


def rank_bound_data(surface) -> tuple[int, bool]:
    """Shioda-Tate bound for the generic rank; exact exactly when it is 0."""
    r = shioda_tate_bound(classify_fibres(to_weierstrass(surface)))
    return r, r == 0


def _delta_poly(surface) -> RatPoly:
    return to_weierstrass(surface).delta


def jump1(surface, budget: Budget, avoid: CoverChallenge | None = None,
          label: str = "surface", log: SearchLog | None = None):
    """Certificates of one extra independent point, one per parameter value.

    Deterministic given surface and budget: fibre parameters x0 and line
    parameters m are swept jointly by max(height(x0), height(m)), and
    certificates carry distinct t0. The stream ends when the certificate
    count is reached or the budget is exhausted.
    """
    log = log if log is not None else SearchLog()
    r_bound, r_exact = rank_bound_data(surface)
    delta = _delta_poly(surface)
    seen: set[Fraction] = set()
    emitted = 0
    active = []  # per-fibre state: [fibre, height-annotated point source, lookahead]
    x0_source = rationals_by_height(budget.x0_height)
    x0_next = next(x0_source, None)
    for stage in range(1, max(budget.x0_height, budget.param_height) + 1):
        while x0_next is not None and _height(x0_next) <= stage:
            x0, x0_next = x0_next, next(x0_source, None)
            log.fibres_tried += 1
            try:
                fib = conic_fibre(surface, x0)
            except DegenerateFibreError:
                log.degenerate_fibres += 1
                continue
            if not conic_solvable(fib):
                log.unsolvable_fibres += 1
                continue
            active.append([fib, parametrize_heights(fib, budget.param_height), None])
        for slot in active:
            fib, gen, pending = slot
            while True:
                if pending is None:
                    pending = next(gen, None)
                if pending is None or pending[0] > stage:
                    break
                _, t0, w = pending
                pending = None
                if emitted >= budget.count:
                    return
                if t0 in seen or delta(t0) == 0:
                    continue
                if avoid is not None and not avoid.admits(t0):
                    log.avoided_t0 += 1
                    continue
                try:
                    spec = specialize(surface, t0)
                except SingularSpecializationError:
                    continue
                x, y = fib.surface_point(t0, w)
                P = spec.transport(x, y)
                if spec.curve.torsion_order(P) is not None:
                    log.torsion_rejects += 1
                    continue
                seen.add(t0)
                emitted += 1
                yield RankJumpCertificate(
                    label=label,
                    t0=t0,
                    curve=(spec.curve.A, spec.curve.B),
                    points=[(P.x, P.y)],
                    provenance=[fib.x0],
                    generic_rank_bound=r_bound,
                    rank_bound_exact=r_exact,
                    claimed_rank_lower_bound=r_bound + 1,
                )
            slot[2] = pending


def jump2(surface, budget: Budget, avoid: CoverChallenge | None = None,
          label: str = "surface", log: SearchLog | None = None):
    """Certificates of two independent points over one parameter value.

    Only pairs whose regulator verdict is "independent" are emitted;
    dependent and inconclusive pairs are logged and skipped.
    """
    log = log if log is not None else SearchLog()
    if isinstance(surface, TwistFamily):
        yield from _jump2_shared_value(surface, budget, avoid, label, log)
    elif isinstance(surface, KMFamily):
        yield from _jump2_stream_intersection(surface, budget, avoid, label, log)
    else:
        raise TypeError("jump2 needs a twist or quadratic-coefficient family")


def _fibres_up_to(surface, height: int, log: SearchLog):
    out = []
    for x0 in rationals_by_height(height):
        log.fibres_tried += 1
        try:
            fib = conic_fibre(surface, x0)
        except DegenerateFibreError:
            log.degenerate_fibres += 1
            continue
        out.append(fib)
    return out


def _jump2_shared_value(surface: TwistFamily, budget: Budget,
                        avoid: CoverChallenge | None, label: str, log: SearchLog):
    r_bound, r_exact = rank_bound_data(surface)
    delta = _delta_poly(surface)
    f = surface.f
    # group fibres by quadratic-extension class, in enumeration order
    by_class: dict[QuadExtClass, list[ConicFibre]] = {}
    pairs: list[tuple[ConicFibre, ConicFibre]] = []
    for fib in _fibres_up_to(surface, budget.x0_height, log):
        partners = by_class.setdefault(fib.ext_class, [])
        for earlier in partners:
            pairs.append((earlier, fib))
        partners.append(fib)
    seen: set[Fraction] = set()
    emitted = 0
    for fib_a, fib_b in pairs:
        if emitted >= budget.count:
            return
        # points flow along whichever fibre of the pair has rational points;
        # the partner point over the same t0 comes from the shared class
        if conic_solvable(fib_a):
            src, other = fib_a, fib_b
        elif conic_solvable(fib_b):
            src, other = fib_b, fib_a
        else:
            log.unsolvable_fibres += 1
            continue
        ratio = rational_sqrt(f(other.x0) / f(src.x0))
        assert ratio is not None, "fibres in one class have a square value ratio"
        for t0, w in parametrize(src, budget.param_height):
            if emitted >= budget.count:
                return
            if t0 in seen or delta(t0) == 0:
                continue
            if avoid is not None and not avoid.admits(t0):
                log.avoided_t0 += 1
                continue
            try:
                spec = specialize(surface, t0)
            except SingularSpecializationError:
                continue
            P = spec.transport(src.x0, w)
            Q = spec.transport(other.x0, w * ratio)
            if (
                spec.curve.torsion_order(P) is not None
                or spec.curve.torsion_order(Q) is not None
            ):
                log.torsion_rejects += 1
                continue
            verdict = regulator(spec.curve, [P, Q])
            if verdict.independent:
                seen.add(t0)
                emitted += 1
                yield RankJumpCertificate(
                    label=label,
                    t0=t0,
                    curve=(spec.curve.A, spec.curve.B),
                    points=[(P.x, P.y), (Q.x, Q.y)],
                    provenance=[src.x0, other.x0],
                    generic_rank_bound=r_bound,
                    rank_bound_exact=r_exact,
                    claimed_rank_lower_bound=r_bound + 2,
                    regulator=(verdict.determinant, verdict.error),
                )
            else:
                if verdict.verdict == "dependent":
                    log.dependent_pairs += 1
                else:
                    log.inconclusive_pairs += 1
                # all shared-value points of this pair transport to one fixed
                # pair on the twist-reduced curve, so one verdict settles it
                break


def _jump2_stream_intersection(surface: KMFamily, budget: Budget,
                               avoid: CoverChallenge | None, label: str, log: SearchLog):
    r_bound, r_exact = rank_bound_data(surface)
    delta = _delta_poly(surface)
    fibres = [f for f in _fibres_up_to(surface, budget.x0_height, log)
              if conic_solvable(f)]
    streams: dict[int, dict[Fraction, Fraction]] = {}

    def stream(i: int) -> dict[Fraction, Fraction]:
        if i not in streams:
            pts: dict[Fraction, Fraction] = {}
            for t0, w in parametrize(fibres[i], budget.param_height):
                pts.setdefault(t0, w)
            streams[i] = pts
        return streams[i]

    seen: set[Fraction] = set()
    emitted = 0
    for j in range(len(fibres)):
        for i in range(j):
            if emitted >= budget.count:
                return
            if fibre_product_genus(fibres[i].branch, fibres[j].branch) == REDUCIBLE:
                continue
            base = stream(i)
            for t0, w_j in sorted(stream(j).items(),
                                  key=lambda kv: (_height(kv[0]), kv[0] < 0, kv[0])):
                if emitted >= budget.count:
                    return
                if t0 not in base or t0 in seen or delta(t0) == 0:
                    continue
                if avoid is not None and not avoid.admits(t0):
                    log.avoided_t0 += 1
                    continue
                try:
                    spec = specialize(surface, t0)
                except SingularSpecializationError:
                    continue
                P = spec.transport(fibres[i].x0, base[t0])
                Q = spec.transport(fibres[j].x0, w_j)
                if (
                    spec.curve.torsion_order(P) is not None
                    or spec.curve.torsion_order(Q) is not None
                ):
                    log.torsion_rejects += 1
                    continue
                verdict = regulator(spec.curve, [P, Q])
                if verdict.independent:
                    seen.add(t0)
                    emitted += 1
                    yield RankJumpCertificate(
                        label=label,
                        t0=t0,
                        curve=(spec.curve.A, spec.curve.B),
                        points=[(P.x, P.y), (Q.x, Q.y)],
                        provenance=[fibres[i].x0, fibres[j].x0],
                        generic_rank_bound=r_bound,
                        rank_bound_exact=r_exact,
                        claimed_rank_lower_bound=r_bound + 2,
                        regulator=(verdict.determinant, verdict.error),
                    )
                elif verdict.verdict == "dependent":
                    log.dependent_pairs += 1
                else:
                    log.inconclusive_pairs += 1


def _height(q: Fraction) -> int:
    return max(abs(q.numerator), q.denominator)


def avoid_covers(surface, challenge: CoverChallenge, budget: Budget,
                 rank: int = 1, label: str = "surface", log: SearchLog | None = None):
    """jump1 (or jump2) certificates whose t0 lies outside every cover image.

    Every emitted t0 satisfies is_square(h_i(t0)) = False for each cover in
    the challenge; an empty challenge reproduces the unfiltered stream.
    """
    if rank == 1:
        yield from jump1(surface, budget, avoid=challenge, label=label, log=log)
    elif rank == 2:
        yield from jump2(surface, budget, avoid=challenge, label=label, log=log)
    else:
        raise ValueError("rank must be 1 or 2")


@dataclass
class CensusEntry:
    x0: Fraction
    ext_class: QuadExtClass
    solvable: bool


@dataclass
class CensusResult:
    """Quadratic-extension classes of the conic fibres up to a height bound."""

    entries: list[CensusEntry]
    degenerate: list[Fraction]
    class_counts: Counter = field(default_factory=Counter)   # solvable fibres only

    @property
    def distinct_classes(self) -> int:
        return len(self.class_counts)

    def distinct_up_to(self, height: int) -> int:
        classes = {
            e.ext_class
            for e in self.entries
            if e.solvable and _height(e.x0) <= height
        }
        return len(classes)


def field_census(surface, x0_height_bound: int) -> CensusResult:
    """Extension classes of all fibres of height <= bound, with multiplicity
    counts restricted to fibres that have rational points."""
    entries = []
    degenerate = []
    counts: Counter = Counter()
    for x0 in rationals_by_height(x0_height_bound):
        try:
            fib = conic_fibre(surface, x0)
        except DegenerateFibreError:
            degenerate.append(x0)
            continue
        solvable = conic_solvable(fib)
        entries.append(CensusEntry(x0, fib.ext_class, solvable))
        if solvable:
            counts[fib.ext_class] += 1
    return CensusResult(entries, degenerate, counts)


def verify_certificate(surface, cert: RankJumpCertificate) -> tuple[bool, list[str]]:
    """Re-verify a certificate from scratch; returns (ok, failure reasons).

    Checks: the parameter avoids singular fibres, each point satisfies the
    specialised curve equation exactly and pulls back to the claimed conic
    fibre, no point is torsion, pairs pass the regulator threshold, and the
    claimed bound matches the evidence.
    """
    reasons = []
    try:
        spec = specialize(surface, cert.t0)
    except SingularSpecializationError as exc:
        return False, [f"specialisation failed: {exc}"]
    if (spec.curve.A, spec.curve.B) != tuple(map(Fraction, cert.curve)):
        reasons.append("recorded curve does not match the specialised fibre")
        return False, reasons
    pts = []
    for (x, y), x0 in zip(cert.points, cert.provenance):
        P = PointQ(Fraction(x), Fraction(y))
        if not spec.curve.is_on(P):
            reasons.append(f"point {P} is off the curve")
            continue
        fx, fy = spec.pullback(P)
        if fx != Fraction(x0) or not _on_surface(surface, fx, fy, cert.t0):
            reasons.append(f"point {P} does not come from the fibre x = {x0}")
            continue
        if spec.curve.torsion_order(P) is not None:
            reasons.append(f"point {P} is torsion")
            continue
        pts.append(P)
    if reasons:
        return False, reasons
    if len(pts) == 2:
        verdict = regulator(spec.curve, pts)
        if not verdict.independent:
            reasons.append(f"regulator verdict is {verdict.verdict}")
    elif len(pts) != 1:
        reasons.append(f"unsupported point count {len(pts)}")
    r_bound, _ = rank_bound_data(surface)
    if cert.generic_rank_bound != r_bound:
        reasons.append("recorded generic rank bound is wrong")
    if cert.claimed_rank_lower_bound != r_bound + len(pts):
        reasons.append("claimed rank bound does not match the evidence")
    return not reasons, reasons


def _on_surface(surface, x: Fraction, y: Fraction, t: Fraction) -> bool:
    if isinstance(surface, TwistFamily):
        return surface.g(t) * y * y == surface.f(x)
    if isinstance(surface, KMFamily):
        return y * y == surface.fibre_quadratic(x)(t)
    return True
