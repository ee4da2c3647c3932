"""Command-line interface: classify, jump, census, verify.

Exit codes: 0 success, 2 invalid input, 3 budget exhausted before the
requested certificate count, 4 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, build_surface, parse_cover_file, parse_surface_config
from .conics import DegenerateFibreError, conic_fibre, conic_solvable
from .jumps import (
    Budget,
    CoverChallenge,
    SearchLog,
    avoid_covers,
    field_census,
    jump1,
    jump2,
    rank_bound_data,
)
from .store import CertificateRecord, append_records, store_file, verify_store
from .surfaces import (
    TwistFamily,
    classify_fibres,
    is_twist_case,
    shioda_tate_bound,
    to_chatelet,
    to_weierstrass,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4


def _load_surface(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    cfg = parse_surface_config(text)
    return cfg, build_surface(cfg)


def _fibred_surface(surface):
    """The conic-bundle machinery needs a twist or quadratic-coefficient
    form; a plain Weierstrass model is accepted when it hides a twist."""
    from .surfaces import WeierstrassQt

    if not isinstance(surface, WeierstrassQt):
        return surface
    recovered = is_twist_case(surface)
    if recovered is None:
        raise ConfigError(
            "a generic weierstrass model carries no conic bundle here; "
            "supply the surface in twist or km form"
        )
    return recovered


def _parse_budget(spec: str) -> Budget:
    try:
        x0, param, count = (int(part) for part in spec.split(","))
        if min(x0, param, count) < 1:
            raise ValueError
        return Budget(x0, param, count)
    except ValueError:
        raise ConfigError(
            f"bad budget {spec!r}; expected three positive integers 'x0,param,count'"
        ) from None


def cmd_classify(args) -> int:
    cfg, surface = _load_surface(args.config)
    w = to_weierstrass(surface)
    cls = classify_fibres(w)
    print(f"surface: {cfg.label} (kind {cfg.kind})")
    print(f"model: y^2 = x^3 + ({w.A!r}) x + ({w.B!r})")
    print("singular fibres:")
    for fd in cls.fibres:
        red = "reduced" if fd.reduced else "non-reduced"
        print(
            f"  place {fd.place!r}: type {fd.kodaira.symbol}, "
            f"{fd.components} components, {red}, euler {fd.euler}"
        )
    print(f"euler number: {cls.euler_total}")
    print(f"shioda-tate rank bound: {shioda_tate_bound(cls)}")
    twist = surface if isinstance(surface, TwistFamily) else is_twist_case(w)
    if twist is None:
        print("twist form: none (not a quadratic twist family)")
    else:
        print(f"twist form: g(t) y^2 = f(x) with f = {twist.f.format('x')}, g = {twist.g!r}")
        if twist.g.degree == 2:
            ch = to_chatelet(twist)
            print(f"chatelet model: w^2 - ({ch.a}) y^2 = {ch.cubic.format('x')}")
    return EXIT_OK


def cmd_jump(args) -> int:
    cfg, surface = _load_surface(args.config)
    surface = _fibred_surface(surface)
    budget = _parse_budget(args.budget)
    challenge = None
    if args.avoid:
        polys = parse_cover_file(Path(args.avoid).read_text(encoding="utf-8"))
        try:
            challenge = CoverChallenge(tuple(polys))
        except ValueError as exc:
            raise ConfigError(f"bad cover file: {exc}") from exc
    log = SearchLog()
    if challenge is not None:
        stream = avoid_covers(surface, challenge, budget, rank=args.rank,
                              label=cfg.label, log=log)
    elif args.rank == 1:
        stream = jump1(surface, budget, label=cfg.label, log=log)
    else:
        stream = jump2(surface, budget, label=cfg.label, log=log)
    records = []
    for cert in stream:
        rec = CertificateRecord(cert, cfg, budget, args.timestamp).reverified()
        records.append(rec)
        print(rec.to_json())
    if args.store:
        added = append_records(args.store, cfg.label, records)
        print(
            f"# store: {added} new of {len(records)} certificates -> "
            f"{store_file(args.store, cfg.label)}",
            file=sys.stderr,
        )
    print(
        f"# search: {len(records)} certificates; fibres tried {log.fibres_tried}, "
        f"degenerate {log.degenerate_fibres}, unsolvable {log.unsolvable_fibres}, "
        f"torsion rejects {log.torsion_rejects}, dependent pairs {log.dependent_pairs}, "
        f"inconclusive {log.inconclusive_pairs}, avoided t0 {log.avoided_t0}",
        file=sys.stderr,
    )
    return EXIT_OK if len(records) >= budget.count else EXIT_BUDGET


def cmd_census(args) -> int:
    cfg, surface = _load_surface(args.config)
    surface = _fibred_surface(surface)
    census = field_census(surface, args.height)
    stored_heights = []
    if args.store:
        from .store import stored_t0
        from fractions import Fraction

        for s in stored_t0(args.store, cfg.label):
            q = Fraction(s)
            stored_heights.append(max(abs(q.numerator), q.denominator))
    header = "height  distinct_classes  solvable_fibres"
    if args.store:
        header += "  stored_certificates"
    print(f"surface: {cfg.label}")
    print(header)
    for h in range(1, args.height + 1):
        solvable = sum(
            1 for e in census.entries
            if e.solvable and max(abs(e.x0.numerator), e.x0.denominator) <= h
        )
        row = f"{h:6d}  {census.distinct_up_to(h):16d}  {solvable:15d}"
        if args.store:
            row += f"  {sum(1 for s in stored_heights if s <= h):19d}"
        print(row)
    print(f"# degenerate fibre parameters skipped: {len(census.degenerate)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = verify_store(args.store)
    if not reports:
        print(f"no records under {args.store}")
        return EXIT_OK
    failures = 0
    for report in reports:
        for lineno, ok, reasons in report.results:
            status = "ok" if ok else "FAIL: " + "; ".join(reasons)
            print(f"{report.path}:{lineno}: {status}")
        failures += report.failures
    total = sum(len(r.results) for r in reports)
    print(f"# verified {total} records, {failures} failures")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankjump",
        description="rank-jump search engine for rational elliptic surfaces over Q(t)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="singular fibres, rank bound, twist form")
    p.add_argument("--config", required=True, help="surface definition file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("jump", help="stream rank-jump certificates as JSON lines")
    p.add_argument("--config", required=True)
    p.add_argument("--rank", type=int, choices=(1, 2), default=1)
    p.add_argument("--budget", default="20,16,100",
                   help="x0 height, parameter height, certificate count")
    p.add_argument("--avoid", help="file of quadratic covers to avoid")
    p.add_argument("--store", help="append certificates to this store directory")
    p.add_argument("--timestamp", default=None,
                   help="run stamp recorded in certificates (default: none, "
                        "keeping streams byte-reproducible)")
    p.set_defaults(func=cmd_jump)

    p = sub.add_parser("census", help="distinct quadratic-extension classes by height")
    p.add_argument("--config", required=True)
    p.add_argument("--height", type=int, default=30)
    p.add_argument("--store", help="also count stored certificates by t0 height")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="re-verify every certificate in a store")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
