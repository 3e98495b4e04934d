"""Monge-Ampère metric on the cone over an affine sphere, and the semi-flat assembly.

On ``B = M x (0, 1)`` the potential ``phi(r) = -H ∫_0^r (1 - H s^{n+1})^{1/(n+1)} ds``
has Hessian

    phi'' dr^2 - r H phi' g

for the flat connection of the cone, where ``g`` is the affine-sphere metric
on the n-dimensional base.  Its determinant with respect to the parallel
volume ``r^n det_g ∧ dr`` is identically 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError

__all__ = [
    "ConeGeometry",
    "SemiFlatSample",
    "phi",
    "phi_prime",
    "phi_second",
    "ma_metric_coeffs",
    "ma_metric_closed_form",
    "verify_monge_ampere",
    "central_first_difference",
    "central_second_difference",
    "semiflat_assemble",
]


@dataclass(frozen=True)
class ConeGeometry:
    n: int
    H: int
    r: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError("base dimension n must be a positive integer")
        if self.H not in (1, -1):
            raise DomainError("H must be +1 or -1")
        if not (self.r > 0 and np.isfinite(self.r)):
            raise DomainError("r must be positive")
        if self.margin <= 0:
            raise DomainError(f"1 - H r^(n+1) must be positive (r={self.r}, n={self.n}, H={self.H})")

    @property
    def margin(self) -> float:
        return 1.0 - self.H * self.r ** (self.n + 1)

    def at(self, r: float) -> "ConeGeometry":
        return ConeGeometry(self.n, self.H, r)


def _integrand(n: int, H: int):
    p = 1.0 / (n + 1)
    return lambda s: -H * (1.0 - H * s ** (n + 1)) ** p


def phi(c: ConeGeometry) -> float:
    """Potential by adaptive Gauss-Kronrod quadrature (absolute accuracy 1e-12)."""
    value, _ = quad(_integrand(c.n, c.H), 0.0, c.r, epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(value)


def phi_prime(c: ConeGeometry) -> float:
    return float(_integrand(c.n, c.H)(c.r))


def phi_second(c: ConeGeometry) -> float:
    """Derivative of the integrand: ``r^n (1 - H r^{n+1})^{-n/(n+1)}``."""
    n = c.n
    return float(c.r ** n * c.margin ** (-n / (n + 1)))


def ma_metric_coeffs(c: ConeGeometry) -> tuple[float, float]:
    """Coefficients of ``dr^2`` and of the base metric in the Hessian of phi."""
    return phi_second(c), -c.r * c.H * phi_prime(c)


def ma_metric_closed_form(c: ConeGeometry) -> tuple[float, float]:
    """Same coefficients written out: ``r^n m^{-n/(n+1)}`` and ``r m^{1/(n+1)}``, ``m = 1 - H r^{n+1}``."""
    n, r, m = c.n, c.r, c.margin
    return r ** n * m ** (-n / (n + 1)), r * m ** (1 / (n + 1))


def verify_monge_ampere(c: ConeGeometry, base_metric: np.ndarray | None = None) -> float:
    """``|det - 1|`` for the Hessian metric in a frame of unit parallel volume.

    The frame is ``(f_1, ..., f_n, r^{-n} ∂_r)`` with ``f`` orthonormal for
    the base metric (default: identity), so ``r^n det_g ∧ dr`` takes the
    value 1 on it.
    """
    n = c.n
    gB = np.eye(n) if base_metric is None else np.asarray(base_metric, dtype=float)
    if gB.shape != (n, n):
        raise DomainError(f"base metric must be {n}x{n}")
    c_rr, c_base = ma_metric_coeffs(c)
    G = np.zeros((n + 1, n + 1))
    G[:n, :n] = c_base * gB
    G[n, n] = c_rr
    L = np.linalg.cholesky(gB)
    E = np.zeros((n + 1, n + 1))
    E[:n, :n] = np.linalg.inv(L).T  # columns are g_B-orthonormal
    E[n, n] = c.r ** (-n)
    return float(abs(np.linalg.det(E.T @ G @ E) - 1.0))


def _default_step(c: ConeGeometry) -> float:
    # phi is analytic on (0, 1) for H = 1 with a branch point at r = 1
    scale = min(c.r, 1.0 - c.r) if c.H == 1 else min(c.r, 1.0)
    return 0.05 * scale


def central_first_difference(c: ConeGeometry, h: float | None = None) -> float:
    """Richardson-extrapolated ``(phi(r+h) - phi(r-h)) / 2h``.

    The increment of phi is integrated directly rather than differenced.
    """
    f = _integrand(c.n, c.H)
    h = h or _default_step(c)

    def first(step):
        inc, _ = quad(f, c.r - step, c.r + step, epsabs=0.0, epsrel=1e-12)
        return inc / (2 * step)

    return (4 * first(h / 2) - first(h)) / 3


def central_second_difference(c: ConeGeometry, h: float | None = None) -> float:
    """Richardson-extrapolated ``(phi(r+h) - 2 phi(r) + phi(r-h)) / h^2``.

    The numerator is computed as ``∫_0^h f(r+s) - f(r-s) ds`` to avoid
    subtracting nearly equal values of phi.
    """
    f = _integrand(c.n, c.H)
    h = h or _default_step(c)

    def second(step):
        # absolute floor: pointwise rounding of f(r+s) - f(r-s) is about eps |f|
        val, _ = quad(lambda s: f(c.r + s) - f(c.r - s), 0.0, step,
                      epsabs=8 * np.finfo(float).eps * step, epsrel=1e-12)
        return val / (step * step)

    return (4 * second(h / 2) - second(h)) / 3


@dataclass(frozen=True)
class SemiFlatSample:
    """Fibre-constant metric and complex structure on ``TB`` at one base point."""

    base_metric: np.ndarray
    J: np.ndarray
    g: np.ndarray

    @property
    def omega(self) -> np.ndarray:
        """Matrix of ``ω(v, w) = g(Jv, w)``."""
        return self.J.T @ self.g

    def invariant_defects(self) -> dict:
        m = self.g.shape[0]
        return {
            "J_squared_plus_I": float(np.max(np.abs(self.J @ self.J + np.eye(m)))),
            "g_J_invariance": float(np.max(np.abs(self.J.T @ self.g @ self.J - self.g))),
            "omega_antisymmetry": float(np.max(np.abs(self.omega + self.omega.T))),
            "fibre_isotropy": float(np.max(np.abs(self.omega[: m // 2, : m // 2]))),
        }


def semiflat_assemble(base_metric) -> SemiFlatSample:
    """``g = diag(g_B, g_B)`` and ``J = [[0, -I], [I, 0]]`` on base ⊕ fibre directions."""
    gB = np.asarray(base_metric, dtype=float)
    if gB.ndim != 2 or gB.shape[0] != gB.shape[1]:
        raise DomainError("base metric must be a square matrix")
    if not np.allclose(gB, gB.T, rtol=0, atol=1e-14 * max(1.0, np.max(np.abs(gB)))):
        raise DomainError("base metric must be symmetric")
    try:
        np.linalg.cholesky(gB)
    except np.linalg.LinAlgError:
        raise DomainError("base metric must be positive definite") from None
    n = gB.shape[0]
    I, Z = np.eye(n), np.zeros((n, n))
    J = np.block([[Z, -I], [I, Z]])
    g = np.block([[gB, Z], [Z, gB]])
    return SemiFlatSample(gB, J, g)
