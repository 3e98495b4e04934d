"""Lawton's cubic surface of trace coordinates and its rational parameterization.

Points are exact (``Fraction``) or numeric (``float``).  A triple of
Fractions/ints is treated exactly; any float coordinate switches the
point to numeric mode with a scale-aware tolerance.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, OffSurfaceError
from .exact import format_scalar, rational_sqrt

__all__ = [
    "CharacterPoint",
    "ParamPoint",
    "ComponentLabel",
    "lawton_eval",
    "on_surface",
    "psi",
    "solve_z",
    "classify_component",
    "singular_locus",
    "surface_tolerance",
]


def _coerce(v):
    if isinstance(v, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (Fraction, float)):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, complex):
        raise DomainError("coordinates must be real")
    raise TypeError(f"unsupported coordinate type {type(v).__name__}")


@dataclass(frozen=True)
class CharacterPoint:
    """Trace coordinates ``(x, y, z)``."""

    x: Fraction | float
    y: Fraction | float
    z: Fraction | float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))

    @classmethod
    def parse(cls, text: str, numeric: bool = False) -> "CharacterPoint":
        parts = text.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected x,y,z but got {text!r}")
        conv = float if numeric else Fraction
        return cls(*(conv(p.strip()) for p in parts))

    @property
    def exact(self) -> bool:
        return not any(isinstance(v, float) for v in self.astuple())

    def astuple(self):
        return (self.x, self.y, self.z)

    def is_integral(self) -> bool:
        return self.exact and all(v.denominator == 1 for v in self.astuple())

    def to_json(self):
        if self.exact:
            return [format_scalar(v) for v in self.astuple()]
        return [float(v) for v in self.astuple()]

    def __iter__(self):
        return iter(self.astuple())


@dataclass(frozen=True)
class ParamPoint:
    """Parameters ``(s, t)`` of the rational map; ``st - s^3 - 1`` must be nonzero."""

    s: Fraction
    t: Fraction

    def __post_init__(self):
        s, t = Fraction(self.s), Fraction(self.t)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        if s * t - s ** 3 - 1 == 0:
            raise DomainError(f"(s,t)=({s},{t}) lies on st - s^3 - 1 = 0")


class ComponentLabel(str, enum.Enum):
    C1 = "C1"
    C2 = "C2"


def lawton_eval(p: CharacterPoint):
    """Evaluate the defining cubic at ``p``."""
    x, y, z = p.x, p.y, p.z
    return (414 - 108 * x + x ** 3 - 108 * y + 21 * x * y + y ** 3
            - (51 - 9 * x - 9 * y + x * y) * z + z * z)


def surface_tolerance(p: CharacterPoint) -> float:
    x, y, z = (abs(float(v)) for v in p)
    return 1e-9 * (1 + x ** 3 + y ** 3 + z ** 2)


def on_surface(p: CharacterPoint) -> bool:
    value = lawton_eval(p)
    if p.exact:
        return value == 0
    return abs(value) < surface_tolerance(p)


def psi(p: ParamPoint) -> CharacterPoint:
    s, t = p.s, p.t
    den = s * t - s ** 3 - 1
    if den == 0:
        raise DomainError("parameter lies on the singular locus of the map")
    r = (3 + 3 * s + t) ** 2 / den
    return CharacterPoint(3 + r, 3 + s * r, 3 + t * r)


def solve_z(x, y) -> list:
    """Roots of ``P(x, y, z) = 0`` in z, sorted, with multiplicity.

    Exact inputs yield only rational roots (empty if the discriminant is
    not a rational square).  Float inputs yield the real roots.
    """
    x, y = _coerce(x), _coerce(y)
    # z^2 - B z + C with B = 51 - 9x - 9y + xy
    b = 51 - 9 * x - 9 * y + x * y
    c = 414 - 108 * x + x ** 3 - 108 * y + 21 * x * y + y ** 3
    disc = b * b - 4 * c
    if isinstance(disc, float):
        if disc < 0:
            return []
        root = math.sqrt(disc)
        return sorted([(b - root) / 2, (b + root) / 2])
    root = rational_sqrt(disc)
    if root is None:
        return []
    return [(b - root) / 2, (b + root) / 2]


def classify_component(p: CharacterPoint) -> ComponentLabel:
    """C2 iff ``x > 3`` and ``y > 3``; boundary points go to C1."""
    if not on_surface(p):
        raise OffSurfaceError(f"point {p.to_json()} is not on the surface")
    if p.x > 3 and p.y > 3:
        return ComponentLabel.C2
    return ComponentLabel.C1


def singular_locus() -> CharacterPoint:
    return CharacterPoint(3, 3, 3)
