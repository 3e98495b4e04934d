"""Residues of rank-3 strongly parabolic Higgs fields on the sphere with three marked points.

The marked points sit at z = 0, 1, infinity.  A field on the trivial
bundle is determined by its residues ``r1`` (at 0) and ``r2`` (at 1); the
residue theorem gives ``r3 = -(r1 + r2)``.  Scalars are Gaussian rationals.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .errors import DomainError
from .exact import (
    Fraction,
    GaussianRational,
    Matrix,
    format_scalar,
    nullspace,
    rational_cbrt,
)

__all__ = [
    "FamilyType",
    "HiggsFamily",
    "ResidueData",
    "NilpotencyReport",
    "build_family",
    "check_nilpotency",
    "intertwiner_space",
    "real_criterion",
    "cyclic_ray_invariant",
    "kernel_configuration",
]


class FamilyType(str, enum.Enum):
    CYCLIC_Q = "CyclicQ"
    GEN_I = "GenI"
    GEN_II = "GenII"
    GEN_III = "GenIII"
    GEN_IV = "GenIV"

    @classmethod
    def parse(cls, text: str) -> "FamilyType":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise DomainError(f"unknown family {text!r}")


def _g(v) -> GaussianRational:
    return GaussianRational.coerce(v)


@dataclass(frozen=True)
class HiggsFamily:
    """A member of one of the five families.

    ``alpha, beta`` parametrize GenI, ``xi`` parametrizes GenII-IV and
    ``q`` the cyclic family on O(-1) + O + O(1).  For GenI the residue
    at z = 1 has poles at beta = 0 and beta = -1, so those are rejected;
    alpha = 0 is allowed and gives the zero field.
    """

    family: FamilyType
    alpha: GaussianRational | None = None
    beta: GaussianRational | None = None
    xi: GaussianRational | None = None
    q: GaussianRational | None = None

    def __post_init__(self):
        fam = self.family if isinstance(self.family, FamilyType) else FamilyType.parse(self.family)
        object.__setattr__(self, "family", fam)
        for name in ("alpha", "beta", "xi", "q"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _g(v))
        if fam is FamilyType.GEN_I:
            if self.alpha is None or self.beta is None:
                raise DomainError("GenI needs alpha and beta")
            if self.beta == 0 or self.beta == -1:
                raise DomainError("GenI residue at z=1 is undefined for beta in {0, -1}")
        elif fam is FamilyType.CYCLIC_Q:
            if self.q is None:
                object.__setattr__(self, "q", GaussianRational(0))
        else:
            if self.xi is None:
                raise DomainError(f"{fam.value} needs xi")
            if self.xi == 0:
                raise DomainError(f"{fam.value} needs xi != 0")

    def params_json(self):
        return {k: format_scalar(getattr(self, k)) for k in ("alpha", "beta", "xi", "q")
                if getattr(self, k) is not None}


@dataclass(frozen=True)
class ResidueData:
    """Residues at z = 0, 1, infinity.

    ``global_frame`` is False when the residues are written in unrelated
    local frames of a nontrivial bundle; the sum-zero identity only makes
    sense in a common trivialization.
    """

    r1: Matrix
    r2: Matrix
    r3: Matrix
    global_frame: bool = True

    @classmethod
    def from_pair(cls, r1, r2) -> "ResidueData":
        r1 = r1 if isinstance(r1, Matrix) else Matrix(r1)
        r2 = r2 if isinstance(r2, Matrix) else Matrix(r2)
        return cls(r1, r2, -(r1 + r2))

    def residues(self):
        return self.r1, self.r2, self.r3

    def sum_is_zero(self) -> bool:
        return (self.r1 + self.r2 + self.r3).is_zero()

    def to_json(self):
        return {"r1": self.r1.to_json(), "r2": self.r2.to_json(), "r3": self.r3.to_json(),
                "global_frame": self.global_frame}


def _mat(rows) -> Matrix:
    return Matrix([[_g(v) if isinstance(v, GaussianRational) else v for v in row] for row in rows])


def build_family(f: HiggsFamily) -> ResidueData:
    fam = f.family
    if fam is FamilyType.CYCLIC_Q:
        # q has no residue; each residue is the principal nilpotent in a local frame
        n = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        return ResidueData(n, n, n, global_frame=False)
    if fam is FamilyType.GEN_I:
        a, b = f.alpha, f.beta
        r1 = _mat([[0, b + 1, b], [0, 1, 1], [0, -1, -1]]).scale(a)
        r2 = _mat([[-1, 0, -b], [-1 / (1 + b), 0, -1], [1 / b, 0, 1]]).scale(a)
        return ResidueData.from_pair(r1, r2)
    x = f.xi
    if fam is FamilyType.GEN_II:
        r1, r2 = [[0, 1, 0], [0, 0, 1], [0, 0, 0]], [[0, 0, 0], [0, 0, -1], [x, 0, 0]]
    elif fam is FamilyType.GEN_III:
        r1, r2 = [[0, 0, 1], [0, 0, 0], [0, 1, 0]], [[0, 0, -1], [x, 0, 0], [0, 0, 0]]
    else:
        r1, r2 = [[0, 0, x], [0, 0, 0], [0, 1, 0]], [[0, 0, 0], [0, 0, -x], [1, 0, 0]]
    return ResidueData.from_pair(_mat(r1), _mat(r2))


@dataclass(frozen=True)
class NilpotencyReport:
    traces: tuple  # (tr r, tr r^2, tr r^3)
    nilpotent: bool
    index: int | None  # least k with r^k = 0

    @property
    def maximal(self) -> bool:
        return self.index == 3

    def to_json(self):
        return {"traces": [format_scalar(_g(t)) for t in self.traces],
                "nilpotent": self.nilpotent, "index": self.index}


def _nilpotency(r: Matrix) -> NilpotencyReport:
    r2 = r @ r
    r3 = r2 @ r
    traces = (r.trace(), r2.trace(), r3.trace())
    nilpotent = all(t == 0 for t in traces)
    index = None
    if nilpotent:
        index = next(k for k, p in ((1, r), (2, r2), (3, r3)) if p.is_zero())
    return NilpotencyReport(traces, nilpotent, index)


def check_nilpotency(d: ResidueData) -> tuple[NilpotencyReport, ...]:
    return tuple(_nilpotency(r) for r in d.residues())


def intertwiner_space(d: ResidueData) -> list[Matrix]:
    """Basis of ``{g : g r_i = r_i^T g, i = 1, 2}`` (i = 3 then follows for a global frame)."""
    residues = (d.r1, d.r2) if d.global_frame else d.residues()
    rows = []
    for r in residues:
        rt = r.transpose()
        for i in range(3):
            for j in range(3):
                # (g r)_ij - (r^T g)_ij in the unknowns g_kl, index 3k + l
                coeffs = [Fraction(0)] * 9
                for k in range(3):
                    coeffs[3 * i + k] = coeffs[3 * i + k] + r[k, j]
                    coeffs[3 * k + j] = coeffs[3 * k + j] - rt[i, k]
                rows.append(coeffs)
    return [Matrix.from_flat(v, 3) for v in nullspace(rows)]


def _normalize_det(g: Matrix) -> Matrix:
    det = g.det()
    det = _g(det)
    if det.im == 0:
        root = rational_cbrt(det.re)
        if root is not None:
            return g.scale(1 / root)
    # no rational cube root: fix the first nonzero entry instead
    pivot = next(v for v in g.flat() if v)
    return g.scale(1 / pivot)


def real_criterion(d: ResidueData, seed: int = 0, tries: int = 32) -> Matrix | None:
    """Invertible g with ``g r_i = r_i^T g`` for all residues, or None.

    Searches the (exact) solution space: basis vectors, pairwise sums,
    then seeded random integer combinations.  The result is scaled to
    det 1 when the determinant has a rational cube root.
    """
    basis = intertwiner_space(d)
    if not basis:
        return None
    candidates = list(basis)
    candidates += [a + b for i, a in enumerate(basis) for b in basis[i + 1:]]
    rng = random.Random(seed)
    for _ in range(tries):
        g = basis[0].scale(0)
        for b in basis:
            g = g + b.scale(rng.randint(-5, 5))
        candidates.append(g)
    for g in candidates:
        if g.det():
            g = _normalize_det(g)
            for r in d.residues():
                if not (g @ r - r.transpose() @ g).is_zero():
                    raise AssertionError("real criterion solution fails a residue")
            return g
    return None


def cyclic_ray_invariant(q1, q2) -> bool:
    """True iff the cubic differentials differ by a unimodular factor, i.e. ``|q1| = |q2|``."""
    return _g(q1).norm() == _g(q2).norm()


def _span_rank(vectors) -> int:
    if not vectors:
        return 0
    n = len(vectors[0])
    # rank = n - dim of the left kernel of the matrix with these columns
    cols = [[v[i] for v in vectors] for i in range(n)]
    return len(vectors) - len(nullspace(cols))


def kernel_configuration(d: ResidueData) -> dict:
    """Kernel lines of the residues and which case of the classification they realize.

    Returns ``{"lines": [...], "span": k, "case": "i" | "ii" | "iii" | "iv"}``;
    for the cases with spanning kernels, ``"intersection"`` holds the line
    ``ker(r1^2) ∩ (l2 + l3)`` given by coefficients on (l2, l3).
    """
    lines = []
    for r in d.residues():
        ker = nullspace(r.rows)
        if len(ker) != 1:
            raise DomainError("kernel configuration needs maximally nilpotent residues")
        lines.append(ker[0])
    span = _span_rank(lines)
    out = {"lines": [[format_scalar(_g(v)) for v in line] for line in lines], "span": span}
    if span <= 2:
        out["case"] = "iv"
        return out
    r1sq = d.r1 @ d.r1
    l2, l3 = lines[1], lines[2]
    # r1^2 (a l2 + b l3) = 0
    system = [[sum((r1sq[i, k] * l2[k] for k in range(3)), Fraction(0)),
               sum((r1sq[i, k] * l3[k] for k in range(3)), Fraction(0))] for i in range(3)]
    sol = nullspace(system)
    if len(sol) != 1:
        raise DomainError("ker(r1^2) must meet l2 + l3 in a line")
    a, b = sol[0]
    out["intersection"] = [format_scalar(_g(a)), format_scalar(_g(b))]
    out["case"] = "ii" if b == 0 else "iii" if a == 0 else "i"
    return out
