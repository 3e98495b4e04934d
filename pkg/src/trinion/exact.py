"""Exact scalars and small square matrices.

Rationals are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator).  Complex parameters of Higgs fields use
:class:`GaussianRational`, a pair of rationals.  :class:`Matrix` holds a
2x2 or 3x3 array of either kind of scalar; :class:`SL3Matrix` adds the
determinant-one invariant, checked once at construction.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

from .errors import NotUnipotentError

__all__ = [
    "Fraction",
    "GaussianRational",
    "Matrix",
    "SL3Matrix",
    "identity",
    "multiply",
    "inverse",
    "char_poly",
    "is_unipotent",
    "unipotency_index",
    "square_free_decomposition",
    "nullspace",
    "rational_sqrt",
    "rational_cbrt",
    "parse_rational",
    "parse_gaussian",
    "format_scalar",
]


# ---------------------------------------------------------------------------
# scalars

class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, str):
            return parse_gaussian(value)
        return cls(Fraction(value), 0)

    def _other(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (_RationalABC, complex)):
            return GaussianRational.coerce(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / self ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_scalar(self)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a finite decimal into an exact rational."""
    return Fraction(text.strip())


def parse_gaussian(text: str) -> GaussianRational:
    """Parse strings such as ``"1/2"``, ``"3i"``, ``"1-2/3i"`` or ``"i"``."""
    s = text.strip().replace(" ", "").replace("j", "i")
    if not s.endswith("i"):
        return GaussianRational(Fraction(s), 0)
    body = s[:-1]
    # split at the last sign that is not the leading one
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut > 0 and body[cut - 1] not in "eE/":
        re_part, im_part = body[:cut], body[cut:]
    else:
        re_part, im_part = "0", body
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    return GaussianRational(Fraction(re_part), Fraction(im_part))


def format_scalar(v) -> str:
    """Serialize an exact scalar as ``"p/q"`` (``"p"`` when q = 1).

    Gaussian rationals with nonzero imaginary part become ``"a+bi"``.
    """
    if isinstance(v, GaussianRational):
        if v.im == 0:
            return format_scalar(v.re)
        im = "" if abs(v.im) == 1 else format_scalar(abs(v.im))
        sign = "-" if v.im < 0 else "+"
        if v.re == 0:
            return f"{'-' if v.im < 0 else ''}{im}i"
        return f"{format_scalar(v.re)}{sign}{im}i"
    if isinstance(v, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    raise TypeError(f"not an exact scalar: {v!r}")


def _exact(v):
    if isinstance(v, (Fraction, GaussianRational)):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not a matrix entry")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        g = parse_gaussian(v)
        return g.re if g.im == 0 else g
    if isinstance(v, _RationalABC):
        return Fraction(v)
    raise TypeError(f"matrix entries must be exact scalars, got {type(v).__name__}")


def rational_sqrt(q) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _icbrt(n: int) -> int:
    # floor cube root of n >= 0
    if n < 2:
        return n
    r = int(round(n ** (1.0 / 3.0))) if n < 1 << 1000 else 1 << (n.bit_length() // 3 + 1)
    while r * r * r > n:
        r = (r + n // (r * r)) // 2 if r > 1 else 0
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def rational_cbrt(q) -> Fraction | None:
    """Real cube root of a rational when it is rational, otherwise None."""
    q = Fraction(q)
    sign = -1 if q < 0 else 1
    num, den = abs(q.numerator), q.denominator
    a, b = _icbrt(num), _icbrt(den)
    if a ** 3 == num and b ** 3 == den:
        return sign * Fraction(a, b)
    return None


# ---------------------------------------------------------------------------
# matrices

class Matrix:
    """Immutable exact square matrix (2x2 or 3x3)."""

    __slots__ = ("_rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(_exact(v) for v in row) for row in rows)
        n = len(rows)
        if n not in (2, 3) or any(len(r) != n for r in rows):
            raise ValueError("expected a 2x2 or 3x3 array")
        self._rows = rows
        self._validate()

    def _validate(self):
        pass

    @classmethod
    def _wrap(cls, rows):
        obj = object.__new__(cls)
        obj._rows = rows
        return obj

    @classmethod
    def from_flat(cls, values: Sequence, n: int | None = None):
        values = list(values)
        if n is None:
            n = math.isqrt(len(values))
        if n * n != len(values):
            raise ValueError(f"cannot reshape {len(values)} entries into a square matrix")
        return cls([values[i * n:(i + 1) * n] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self._rows)

    @property
    def rows(self):
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def flat(self) -> list:
        return [v for row in self._rows for v in row]

    def to_json(self) -> list[str]:
        """Row-major list of ``"p/q"`` strings."""
        return [format_scalar(v) for v in self.flat()]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = ", ".join("[" + ", ".join(format_scalar(v) for v in r) + "]" for r in self._rows)
        return f"{type(self).__name__}([{body}])"

    def _plain(self, rows):
        return Matrix._wrap(rows)

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._plain(tuple(tuple(a + b for a, b in zip(r, s))
                                 for r, s in zip(self._rows, other._rows)))

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._plain(tuple(tuple(a - b for a, b in zip(r, s))
                                 for r, s in zip(self._rows, other._rows)))

    def __neg__(self):
        return self._plain(tuple(tuple(-a for a in r) for r in self._rows))

    def scale(self, c) -> "Matrix":
        c = _exact(c)
        return self._plain(tuple(tuple(c * a for a in r) for r in self._rows))

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        cols = tuple(zip(*other._rows))
        rows = tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols)
                     for r in self._rows)
        if isinstance(self, SL3Matrix) and isinstance(other, SL3Matrix):
            return SL3Matrix._wrap(rows)
        return Matrix._wrap(rows)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = identity(self.n)
        if isinstance(self, SL3Matrix):
            out = SL3Matrix._wrap(out._rows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def transpose(self) -> "Matrix":
        return self._plain(tuple(zip(*self._rows)))

    @property
    def T(self):
        return self.transpose()

    def trace(self):
        return sum((self._rows[i][i] for i in range(self.n)), Fraction(0))

    def det(self):
        m = self._rows
        if self.n == 2:
            return m[0][0] * m[1][1] - m[0][1] * m[1][0]
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    def adjugate(self) -> "Matrix":
        m = self._rows
        if self.n == 2:
            return Matrix._wrap(((m[1][1], -m[0][1]), (-m[1][0], m[0][0])))
        cof = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != i]
                c = [k for k in range(3) if k != j]
                minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
                cof[i][j] = minor if (i + j) % 2 == 0 else -minor
        return Matrix._wrap(tuple(tuple(cof[j][i] for j in range(3)) for i in range(3)))

    def inverse(self) -> "Matrix":
        d = self.det()
        if d == 0:
            raise ZeroDivisionError("singular matrix")
        adj = self.adjugate()
        rows = tuple(tuple(v / d for v in r) for r in adj._rows)
        return type(self)._wrap(rows) if isinstance(self, SL3Matrix) else Matrix._wrap(rows)

    def is_zero(self) -> bool:
        return not any(v for r in self._rows for v in r)

    def is_integral(self) -> bool:
        return all(isinstance(v, Fraction) and v.denominator == 1 for v in self.flat())

    def conjugate_by(self, g: "Matrix") -> "Matrix":
        """Return ``g^-1 @ self @ g``."""
        out = g.inverse() @ self @ g
        if isinstance(self, SL3Matrix):
            return SL3Matrix._wrap(out._rows)
        return out


class SL3Matrix(Matrix):
    """3x3 exact matrix with determinant exactly one.

    The invariant is checked when the object is built from user data;
    products and inverses of SL3 matrices skip the check.
    """

    __slots__ = ()

    def _validate(self):
        if self.n != 3:
            raise ValueError("SL3Matrix must be 3x3")
        d = self.det()
        if d != 1:
            raise ValueError(f"determinant is {format_scalar(d)}, expected 1")

    @classmethod
    def of(cls, m: Matrix) -> "SL3Matrix":
        if isinstance(m, SL3Matrix):
            return m
        return cls(m.rows)


def identity(n: int = 3) -> Matrix:
    one, zero = Fraction(1), Fraction(0)
    rows = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
    return SL3Matrix._wrap(rows) if n == 3 else Matrix._wrap(rows)


def multiply(a: SL3Matrix, b: SL3Matrix) -> SL3Matrix:
    return a @ b


def inverse(a: SL3Matrix) -> SL3Matrix:
    return a.inverse()


def char_poly(a: Matrix):
    """Coefficients ``(c2, c1, c0)`` of ``det(lambda - a)`` for a 3x3 matrix.

    The monic polynomial is ``lambda**3 + c2*lambda**2 + c1*lambda + c0``.
    """
    t = a.trace()
    t2 = (a @ a).trace()
    return -t, (t * t - t2) / 2, -a.det()


def is_unipotent(a: Matrix) -> bool:
    """True iff ``tr a == tr a^2 == 3`` (for det 1 this means char poly (l-1)^3)."""
    if a.n != 3 or a.det() != 1:
        return False
    return a.trace() == 3 and (a @ a).trace() == 3


def unipotency_index(a: Matrix) -> int:
    """Least ``k`` with ``(a - I)^k = 0``; 3 means a single Jordan block."""
    if not is_unipotent(a):
        raise NotUnipotentError("matrix is not unipotent")
    nil = a - identity(3)
    power = nil
    for k in (1, 2, 3):
        if power.is_zero():
            return k
        power = power @ nil
    raise AssertionError("unipotent 3x3 matrix with (a-I)^3 != 0")


def nullspace(rows: Sequence[Sequence]) -> list[list]:
    """Basis of the right kernel of a matrix over an exact field.

    ``rows`` is any rectangular list of lists of Fraction or
    GaussianRational entries.  Gauss-Jordan elimination, no pivoting
    heuristics needed since arithmetic is exact.
    """
    m = [[_exact(v) for v in r] for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# square-free decomposition

_SIEVE_LIMIT = 10 ** 6


@lru_cache(maxsize=8)
def _primes_upto(n: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(range(p * p, n + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def square_free_decomposition(m: int) -> tuple[int, int]:
    """Write ``m = a * b**2`` with ``a`` square-free (so ``b`` is maximal).

    Trial division by primes up to the cube root of ``m`` leaves a cofactor
    with at most two prime factors, which is either a prime square or
    square-free.  Inputs whose cube root exceeds the sieve limit fall back
    to :func:`sympy.factorint`.
    """
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    r = math.isqrt(m)
    if r * r == m:
        return 1, r
    bound = _icbrt(m) + 1
    if bound > _SIEVE_LIMIT:
        from sympy import factorint

        a = b = 1
        for p, e in factorint(m).items():
            b *= p ** (e // 2)
            a *= p ** (e % 2)
        return a, b
    a = b = 1
    rest = m
    for p in _primes_upto(max(bound, 2)):
        if p > bound:
            break
        if rest % p:
            continue
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        b *= p ** (e // 2)
        a *= p ** (e % 2)
    s = math.isqrt(rest)
    if s > 1 and s * s == rest:
        b *= s
    else:
        a *= rest
    return a, b
