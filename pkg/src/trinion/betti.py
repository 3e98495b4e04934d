"""Unipotent SL3 representations of the free group on two generators.

A representation of the fundamental group of the thrice-punctured sphere
is fixed by the images ``a1, a2`` of two boundary loops; the third
boundary loop maps to ``(a2 a1)^-1``.  All three must be unipotent.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DomainError,
    NotInFieldError,
    NotUnipotentError,
    OffSurfaceError,
    ReducibleError,
    UnsupportedJordanTypeError,
)
from .exact import (
    Matrix,
    SL3Matrix,
    identity,
    is_unipotent,
    nullspace,
    unipotency_index,
)
from .surface import CharacterPoint, lawton_eval, on_surface

__all__ = [
    "JORDAN_A1",
    "JORDAN_A1_TILDE",
    "RepPair",
    "NormalFormCase",
    "NormalForm",
    "character_map",
    "generic_normal_form",
    "degenerate_normal_form",
    "invert_character",
    "is_irreducible",
    "normalize_pair",
    "sym_square",
    "level2_generators",
    "uniformization_rep",
    "UNIFORMIZATION_GAMMA3",
    "is_integral",
    "conjugate_pair",
    "TableRow",
    "PUBLISHED_TABLE",
]

JORDAN_A1 = SL3Matrix([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
JORDAN_A1_TILDE = SL3Matrix([[1, 0, 0], [0, 1, 1], [0, 0, 1]])


@dataclass(frozen=True)
class RepPair:
    """Generator images ``(a1, a2)``; ``a3 = (a2 a1)^-1`` is derived."""

    a1: SL3Matrix
    a2: SL3Matrix

    def __post_init__(self):
        for name in ("a1", "a2"):
            m = getattr(self, name)
            if not isinstance(m, Matrix):
                m = Matrix(m)
            object.__setattr__(self, name, SL3Matrix.of(m))
        for name, m in (("a1", self.a1), ("a2", self.a2), ("a3", self.a3)):
            if not is_unipotent(m):
                raise NotUnipotentError(f"{name} is not unipotent")

    @property
    def a3(self) -> SL3Matrix:
        return (self.a2 @ self.a1).inverse()

    def generators(self):
        return self.a1, self.a2, self.a3

    def to_json(self):
        return {"a1": self.a1.to_json(), "a2": self.a2.to_json(), "a3": self.a3.to_json()}


def character_map(r: RepPair) -> CharacterPoint:
    """``(tr a1 a2^-1, tr a1^-1 a2, tr a1 a2 a1^-1 a2^-1)``."""
    a1, a2 = r.a1, r.a2
    a1i, a2i = a1.inverse(), a2.inverse()
    return CharacterPoint((a1 @ a2i).trace(), (a1i @ a2).trace(),
                          (a1 @ a2 @ a1i @ a2i).trace())


def generic_normal_form(x, y, z) -> SL3Matrix:
    """Second generator paired with ``JORDAN_A1`` for a point with ``y != 3``."""
    x, y, z = Fraction(x), Fraction(y), Fraction(z)
    d = y - 3
    if d == 0:
        raise DomainError("generic normal form needs y != 3")
    return SL3Matrix._wrap(tuple(tuple(Fraction(v) for v in row) for row in (
        (0, (3 * x + 3 * y + z - 21) / d ** 2,
         -(63 + x * x - 15 * x - 27 * y + 3 * x * y + 3 * y * y) / d ** 3),
        (0, -(x - 3) / d, (30 - 6 * x - 6 * y + x * y - z) / d ** 2),
        (d, 0, 3 + (x - 3) / d),
    )))


def degenerate_normal_form(b21) -> SL3Matrix:
    """Second generator for the ``y = 3`` family, indexed by ``b21 != 0``.

    Its character with ``JORDAN_A1`` is ``(3 - b21^2, 3, 3 + 3 b21^2 - b21^3)``.
    """
    b = Fraction(b21)
    if b == 0:
        raise DomainError("b21 must be nonzero")
    return SL3Matrix([[0, 3 - 3 / b - b, (b - 1) ** 3 / b ** 2],
                      [b, 3 - b, 0],
                      [0, -b, b]])


class NormalFormCase(str, enum.Enum):
    GENERIC = "Generic_yne3"
    DEGENERATE = "Degenerate_yeq3"
    TRIVIAL = "Trivial"


@dataclass(frozen=True)
class NormalForm:
    """Normal form of a pair plus the conjugator ``g`` with ``g^-1 a g`` normal.

    ``g`` is unique up to scale; the scale is fixed by making its first
    nonzero entry (row-major, normally ``g[0,0]``) equal to 1, so ``g`` is
    in GL3 rather than SL3.
    """

    case: NormalFormCase
    pair: RepPair
    conjugator: Matrix
    b21: Fraction | None = None

    def to_json(self):
        out = {"case": self.case.value, "pair": self.pair.to_json(),
               "conjugator": self.conjugator.to_json()}
        if self.b21 is not None:
            out["b21"] = str(self.b21)
        return out


def _require_exact_on_surface(p: CharacterPoint):
    if not p.exact:
        raise DomainError("inversion works over the rationals; pass exact coordinates")
    if not on_surface(p):
        raise OffSurfaceError(f"P{tuple(p.to_json())} = {lawton_eval(p)} != 0")


def _normal_form_of_point(p: CharacterPoint):
    _require_exact_on_surface(p)
    x, y, z = p.x, p.y, p.z
    if y != 3:
        return NormalFormCase.GENERIC, RepPair(JORDAN_A1, generic_normal_form(x, y, z)), None
    if x != 3:
        b21 = (12 - 3 * x - z) / (3 - x)
        if b21 * b21 != 3 - x:
            raise NotInFieldError(f"point needs b21 with b21^2 = {3 - x}, not rational")
        return NormalFormCase.DEGENERATE, RepPair(JORDAN_A1, degenerate_normal_form(b21)), b21
    # P(3, 3, z) = (z - 3)^2, so the surface forces z = 3 here
    return NormalFormCase.TRIVIAL, RepPair(identity(3), identity(3)), None


def invert_character(p: CharacterPoint) -> RepPair:
    """A rational representation whose character is ``p``.

    Raises OffSurfaceError off the surface and NotInFieldError when the
    ``y = 3`` branch would need an irrational parameter.
    """
    _, pair, _ = _normal_form_of_point(p)
    if character_map(pair) != p:
        raise AssertionError(f"inversion failed round trip at {p.to_json()}")
    return pair


def is_irreducible(r: RepPair) -> bool:
    return character_map(r) != CharacterPoint(3, 3, 3)


def _intertwiners(pairs):
    """Basis of matrices g with ``a g = g b`` for every (a, b) in ``pairs``."""
    rows = []
    for a, b in pairs:
        for i in range(3):
            for j in range(3):
                # (a g)_ij - (g b)_ij, unknown g_kl at index 3k + l
                coeffs = [Fraction(0)] * 9
                for k in range(3):
                    coeffs[3 * k + j] += a[i, k]
                    coeffs[3 * i + k] -= b[k, j]
                rows.append(coeffs)
    return [Matrix.from_flat(v, 3) for v in nullspace(rows)]


def normalize_pair(r: RepPair) -> NormalForm:
    """Conjugate ``r`` into normal form: ``g^-1 a1 g = A1`` and ``g^-1 a2 g`` normal."""
    if unipotency_index(r.a1) != 3:
        raise UnsupportedJordanTypeError("a1 must be a single Jordan block")
    p = character_map(r)
    if p == CharacterPoint(3, 3, 3):
        raise ReducibleError("pair has the character of the trivial representation")
    case, target, b21 = _normal_form_of_point(p)
    basis = _intertwiners([(r.a1, target.a1), (r.a2, target.a2)])
    if len(basis) != 1:
        raise AssertionError(f"expected a one-dimensional intertwiner space, got {len(basis)}")
    g = basis[0]
    pivot = next(v for v in g.flat() if v != 0)
    g = g.scale(1 / pivot)
    if g.det() == 0:
        raise AssertionError("intertwiner is singular")
    return NormalForm(case=case, pair=target, conjugator=g, b21=b21)


def sym_square(m) -> SL3Matrix:
    """Action of a 2x2 matrix on quadratic forms in the basis ``e1^2, e1 e2, e2^2``."""
    if not isinstance(m, Matrix):
        m = Matrix(m)
    if m.n != 2 or m.det() != 1:
        raise DomainError("sym_square needs a 2x2 matrix of determinant 1")
    a, b, c, d = m.flat()
    return SL3Matrix([[a * a, a * b, b * b],
                      [2 * a * c, a * d + b * c, 2 * b * d],
                      [c * c, c * d, d * d]])


def level2_generators() -> tuple[Matrix, Matrix]:
    """Parabolic generators of the level-2 principal congruence subgroup."""
    return Matrix([[1, 2], [0, 1]]), Matrix([[1, 0], [-2, 1]])


_RHO0_GAMMA1 = SL3Matrix([[1, 2, 0], [0, 1, 16], [0, 0, 1]])
_RHO0_GAMMA2 = SL3Matrix([[0, 1, -7], [0, -1, 8], [1, 0, 4]])
UNIFORMIZATION_GAMMA3 = SL3Matrix([[12, 14, 1], [-8, -9, 0], [1, 1, 0]])


def uniformization_rep() -> RepPair:
    """Integral representation in the class of the Fuchsian uniformization."""
    return RepPair(_RHO0_GAMMA1, _RHO0_GAMMA2)


def is_integral(r: RepPair) -> bool:
    return r.a1.is_integral() and r.a2.is_integral()


def conjugate_pair(r: RepPair, g) -> RepPair:
    """``(g a1 g^-1, g a2 g^-1)`` for any invertible rational g."""
    if not isinstance(g, Matrix):
        g = Matrix(g)
    gi = g.inverse()
    return RepPair(SL3Matrix((g @ r.a1 @ gi).rows), SL3Matrix((g @ r.a2 @ gi).rows))


@dataclass(frozen=True)
class TableRow:
    """One row of the published table of integral points in the Hitchin component."""

    s: Fraction
    t: Fraction
    printed_character: tuple[int, int, int]
    gamma1: Matrix
    gamma2: Matrix
    amended_gamma2: Matrix | None = None


def _row(s, t, xyz, g1, g2, amended=None):
    return TableRow(Fraction(s), Fraction(t), xyz, Matrix(g1), Matrix(g2),
                    None if amended is None else Matrix(amended))


# Transcribed verbatim, including entries that fail validation.  The last
# row's printed gamma2 has determinant 17; flipping the sign of its (3,3)
# entry is the unique single-entry change in [-60, 60] giving a valid pair,
# and that pair has the printed character.
PUBLISHED_TABLE = (
    _row(1, 3, (84, 84, 256),
         [[1, 9, 0], [0, 1, 9], [0, 0, 1]], [[0, 1, -7], [0, -1, 8], [1, 0, 4]]),
    _row(3, 20, (35, 99, 643),
         [[1, 11, 32], [0, 97, 288], [0, -32, -95]], [[0, 1, 3], [0, 21, 64], [1, -6, -18]]),
    _row("7/5", "18/5", (93, 129, 327),
         [[1, 18, -5], [0, 1, 1], [0, 0, 1]], [[0, 1, -1], [2, -1, 2], [7, -1, -4]],
         amended=[[0, 1, -1], [2, -1, 2], [7, -1, 4]]),
)
