"""Integral representations and integer points of the character surface.

Two infinite families of SL3(Z) representations are built here, one per
real component, together with a brute-force scanner for integer points.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .betti import RepPair, character_map, invert_character, is_integral
from .errors import DivisibilityError, DomainError
from .exact import Matrix, SL3Matrix, square_free_decomposition, unipotency_index
from .surface import (
    CharacterPoint,
    ComponentLabel,
    ParamPoint,
    classify_component,
    on_surface,
    psi,
)

__all__ = [
    "DEFAULT_MAX_INDEX",
    "RecursionState",
    "DiophantineTriple",
    "IntegralWitness",
    "verify_diophantine",
    "hitchin_recursion",
    "auxiliary_defect",
    "c1_family",
    "c2_rep",
    "scan_integer_points",
    "table_rows",
    "rows_to_csv",
]

DEFAULT_MAX_INDEX = 16


@dataclass(frozen=True)
class RecursionState:
    """State ``(u_{n-1}, u_n)`` of ``u_{n+1} = 23 u_n - u_{n-1} - 4`` with ``u_0 = 1, u_1 = 2``."""

    n: int = 1
    u_prev: int = 1
    u_curr: int = 2

    def step(self) -> "RecursionState":
        return RecursionState(self.n + 1, self.u_curr, 23 * self.u_curr - self.u_prev - 4)

    @staticmethod
    def at(n: int) -> "RecursionState":
        if n < 0:
            raise DomainError("recursion index must be >= 0")
        # u_{-1} = 17 is forced by running the recursion backwards from u_0, u_1
        state = RecursionState(0, 17, 1)
        while state.n < n:
            state = state.step()
        return state


def verify_diophantine(k: int, l: int, m: int) -> bool:
    """``(3k+l+3)^2 = m(kl - k^3 - 1)`` and ``l > k^2 + 1/k``."""
    if min(k, l, m) <= 0:
        return False
    if (3 * k + l + 3) ** 2 != m * (k * l - k ** 3 - 1):
        return False
    return Fraction(l) > k * k + Fraction(1, k)


@dataclass(frozen=True)
class DiophantineTriple:
    k: int
    l: int
    m: int

    def __post_init__(self):
        if not verify_diophantine(self.k, self.l, self.m):
            raise DomainError(f"({self.k}, {self.l}, {self.m}) is not a valid triple")

    def param(self) -> ParamPoint:
        return ParamPoint(Fraction(1, self.k), Fraction(self.l, self.k))


def _b(u_prev: int, u: int) -> int:
    return 29 + u * u + u * (4 - 23 * u_prev) + u_prev * (4 + u_prev)


def auxiliary_defect(n: int) -> tuple[int, int]:
    """Both sides of the identity driving the induction.

    Returns ``((3+3k+l)^2 - m(kl-k^3-1), (1+u_n^2) b_{n-1})``; they agree
    and vanish for every n >= 1.
    """
    s = RecursionState.at(n)
    prev = RecursionState.at(n - 1)
    k, l, m = _klm(s)
    lhs = (3 + 3 * k + l) ** 2 - m * (k * l - k ** 3 - 1)
    return lhs, (1 + s.u_curr ** 2) * _b(prev.u_prev, prev.u_curr)


def _klm(s: RecursionState):
    u_next = s.step().u_curr
    return s.u_curr, s.u_curr ** 2 + s.u_prev, (u_next + 2) * (s.u_curr + 2) + 24


def hitchin_recursion(n: int, allow_large: bool = False) -> DiophantineTriple:
    """Triple ``(k_n, l_n, m_n)`` from the integer recursion."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > DEFAULT_MAX_INDEX and not allow_large:
        raise DomainError(f"n > {DEFAULT_MAX_INDEX} needs allow_large=True")
    lhs, rhs = auxiliary_defect(n)
    if lhs != rhs or lhs != 0:
        raise AssertionError(f"auxiliary identity fails at n={n}")
    return DiophantineTriple(*_klm(RecursionState.at(n)))


@dataclass(frozen=True)
class IntegralWitness:
    """An integral representation together with its character and component."""

    source: dict
    rep: RepPair
    character: CharacterPoint
    component: ComponentLabel
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not is_integral(self.rep):
            raise AssertionError("witness representation is not integral")
        if character_map(self.rep) != self.character:
            raise AssertionError("witness character does not match its representation")
        if not on_surface(self.character):
            raise AssertionError("witness character is off the surface")

    def to_json(self):
        out = {"source": self.source, "rep": self.rep.to_json(),
               "character": self.character.to_json(), "component": self.component.value}
        out.update(self.extra)
        return out


def c1_family(n: int) -> IntegralWitness:
    """Integral representation with character ``Psi(n, n^2)`` in component C1."""
    n = int(n)
    w = 3 + 3 * n + n * n
    g1 = SL3Matrix([[1, w, 0], [0, 1, w], [0, 0, 1]])
    g2 = SL3Matrix([[0, 0, -1], [1, 0, 3 + n], [-n, -1, 3]])
    rep = RepPair(g1, g2)
    chi = character_map(rep)
    return IntegralWitness({"family": "c1", "n": n}, rep, chi, classify_component(chi),
                           {"w": w})


def _pre_conjugation(k: int, l: int, m: int) -> SL3Matrix:
    f = Fraction
    q = 3 * k + l + 3
    return SL3Matrix([[0, f(q, m), -f(k * k + 3 * k + 3, m)],
                      [0, -k, -f(q - k * m, m)],
                      [m, 0, 3 + k]])


def c2_rep(t: DiophantineTriple) -> IntegralWitness:
    """Integral representation in component C2 built from a Diophantine triple.

    With ``m = a b^2`` (a square-free) the rational normal form at
    ``Psi(1/k, l/k)`` is conjugated by ``C = [[b/m, 0, bk/m], [0, 1, 0], [0, 0, b]]``.
    """
    k, l, m = t.k, t.l, t.m
    a, b = square_free_decomposition(m)
    q = 3 * k + l + 3
    if q % (a * b):
        raise DivisibilityError(f"a*b = {a * b} does not divide 3k+l+3 = {q}")
    g1 = SL3Matrix([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    g2 = _pre_conjugation(k, l, m)
    c = Matrix([[Fraction(b, m), 0, Fraction(b * k, m)], [0, 1, 0], [0, 0, b]])
    ci = c.inverse()
    h1 = SL3Matrix((ci @ g1 @ c).rows)
    h2 = SL3Matrix((ci @ g2 @ c).rows)
    rep = RepPair(h1, h2)
    if not is_integral(rep):
        raise DivisibilityError(f"conjugated representation for {(k, l, m)} is not integral")
    chi = character_map(rep)
    if chi != psi(t.param()):
        raise AssertionError("character differs from the parameterization")
    for g in rep.generators():
        if unipotency_index(g) != 3:
            raise AssertionError("generator is not maximally unipotent")
    return IntegralWitness({"family": "c2", "triple": [k, l, m]}, rep, chi,
                           classify_component(chi),
                           {"square_free": [a, b], "pre_conjugation": g2.to_json(),
                            "conjugator": c.to_json()})


def _scan_rows(args):
    x_lo, x_hi, y_lo, y_hi = args
    # integer-only version of solve_z: z^2 - B z + C = 0
    found = []
    for x in range(x_lo, x_hi + 1):
        for y in range(y_lo, y_hi + 1):
            b = 51 - 9 * x - 9 * y + x * y
            disc = b * b - 4 * (414 - 108 * x + x ** 3 - 108 * y + 21 * x * y + y ** 3)
            if disc < 0:
                continue
            r = math.isqrt(disc)
            if r * r != disc or (b + r) % 2:
                continue
            found.append((x, y, (b - r) // 2))
            if r:
                found.append((x, y, (b + r) // 2))
    return found


def scan_integer_points(x_range, y_range, workers: int | None = None):
    """All integer points with x, y in the given inclusive ranges, sorted.

    Returns ``(CharacterPoint, ComponentLabel)`` pairs.  The box is split
    into x-chunks across ``workers`` processes (default: CPU count); the
    merged output does not depend on scheduling.
    """
    x_lo, x_hi = x_range
    y_lo, y_hi = y_range
    if x_lo > x_hi or y_lo > y_hi:
        return []
    workers = workers or os.cpu_count() or 1
    width = x_hi - x_lo + 1
    cells = width * (y_hi - y_lo + 1)
    if workers <= 1 or cells < 20000:
        triples = _scan_rows((x_lo, x_hi, y_lo, y_hi))
    else:
        step = -(-width // (workers * 4))
        chunks = [(a, min(a + step - 1, x_hi), y_lo, y_hi) for a in range(x_lo, x_hi + 1, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            triples = [t for part in pool.map(_scan_rows, chunks) for t in part]
    out = []
    for x, y, z in sorted(set(triples)):
        p = CharacterPoint(x, y, z)
        out.append((p, classify_component(p)))
    return out


def _param_of(p: CharacterPoint):
    # inverse of the parameterization where it is defined
    if p.x == 3:
        return None
    return ((p.y - 3) / (p.x - 3), (p.z - 3) / (p.x - 3))


TABLE_COLUMNS = ("s", "t", "x", "y", "z", "gamma1", "gamma2")


def table_rows(points, reps=None):
    """Rows ``(s, t, x, y, z, gamma1, gamma2)`` with matrices row-major and space separated.

    Without explicit representations the rational normal form is used.
    """
    rows = []
    for i, p in enumerate(points):
        rep = reps[i] if reps is not None else invert_character(p)
        st = _param_of(p)
        s, t = ("", "") if st is None else (str(st[0]), str(st[1]))
        rows.append((s, t, str(p.x), str(p.y), str(p.z),
                     " ".join(rep.a1.to_json()), " ".join(rep.a2.to_json())))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()
