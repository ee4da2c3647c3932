"""Surface definitions in a plain key-value text format.

A config file holds one surface. Keys and values are separated by '=',
'#' starts a comment, polynomial values are comma- or space-separated
exact rationals ("p/q"), constant term first:

    kind = twist
    label = quadratic-twist
    f = 0, -1, 0, 1      # x^3 - x
    g = 0, 1             # t

Kinds: twist (fields f, g), km (a3, a2, a1, a0), weierstrass (A, B).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import DomainError
from .polynomial import RatPoly
from .surfaces import KMFamily, NotRationalElliptic, TwistFamily, WeierstrassQt
from .kodaira import InvalidModelError


class ConfigError(ValueError):
    """A malformed or invalid surface definition, located by line and field."""


_FIELDS = {
    "twist": ("f", "g"),
    "km": ("a3", "a2", "a1", "a0"),
    "weierstrass": ("A", "B"),
}


@dataclass(frozen=True)
class SurfaceConfig:
    kind: str
    label: str
    polys: dict

    def as_dict(self) -> dict:
        """JSON-ready echo of the definition, coefficients as 'p/q' strings."""
        out = {"kind": self.kind, "label": self.label}
        for name, poly in self.polys.items():
            out[name] = [str(c) for c in poly.coeffs]
        return out


def _parse_rational(token: str, lineno: int, key: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(
            f"line {lineno}: field '{key}': bad rational {token!r}"
        ) from None


def parse_surface_config(text: str) -> SurfaceConfig:
    """Parse the key-value format; raises ConfigError with line precision."""
    values: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = (lineno, val)

    if "kind" not in values:
        raise ConfigError("missing required key 'kind'")
    kind = values.pop("kind")[1]
    if kind not in _FIELDS:
        raise ConfigError(f"unknown kind {kind!r}; expected twist, km or weierstrass")
    label = values.pop("label", (0, kind))[1]

    polys = {}
    for name in _FIELDS[kind]:
        if name not in values:
            raise ConfigError(f"kind {kind!r} requires field '{name}'")
        lineno, val = values.pop(name)
        tokens = [tok for tok in val.replace(",", " ").split() if tok]
        coeffs = [_parse_rational(tok, lineno, name) for tok in tokens]
        polys[name] = RatPoly(coeffs)
    if values:
        stray = ", ".join(sorted(values))
        raise ConfigError(f"unknown keys for kind {kind!r}: {stray}")
    return SurfaceConfig(kind=kind, label=label, polys=polys)


def build_surface(cfg: SurfaceConfig):
    """Construct the surface object, translating invariant violations."""
    try:
        if cfg.kind == "twist":
            return TwistFamily(cfg.polys["f"], cfg.polys["g"])
        if cfg.kind == "km":
            return KMFamily(cfg.polys["a3"], cfg.polys["a2"], cfg.polys["a1"], cfg.polys["a0"])
        return WeierstrassQt(cfg.polys["A"], cfg.polys["B"])
    except (DomainError, InvalidModelError, NotRationalElliptic) as exc:
        raise ConfigError(f"invalid {cfg.kind} surface: {exc}") from exc


def surface_config_from_dict(data: dict) -> SurfaceConfig:
    """Rebuild a SurfaceConfig from its JSON echo (see as_dict)."""
    kind = data.get("kind")
    if kind not in _FIELDS:
        raise ConfigError(f"unknown kind {kind!r} in stored record")
    polys = {}
    for name in _FIELDS[kind]:
        if name not in data:
            raise ConfigError(f"stored record lacks field '{name}'")
        polys[name] = RatPoly([Fraction(c) for c in data[name]])
    return SurfaceConfig(kind=kind, label=data.get("label", kind), polys=polys)


def parse_cover_file(text: str) -> list[RatPoly]:
    """Covers y^2 = h(t), one polynomial per line, coefficients as in configs."""
    covers = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = [tok for tok in line.replace(",", " ").split() if tok]
        coeffs = [_parse_rational(tok, lineno, "cover") for tok in tokens]
        covers.append(RatPoly(coeffs))
    return covers
