"""Newton solver for the Tzitzeica equation of hyperbolic affine spheres on a disk.

Two backgrounds are supported:

``flat``
    ``Δu + 8 s e^{-4u} - e^{2u}/2 = 0`` in a flat chart, ``s = |q|^2``.
``hyperbolic``
    ``(2/λ) Δu + 2 s e^{-4u} - e^{2u} + 1 = 0`` on the Poincaré disk,
    ``λ = 4/(1-ρ^2)^2`` and ``s = |Q|^2`` measured in the hyperbolic metric.

The disk of radius R is discretized on the uniform grid ``[-R, R]^2``
with ``n`` points per side.  Nodes at distance more than ``h/4`` inside
the circle are unknowns; the Laplacian uses the Shortley-Weller stencil at nodes whose
neighbours fall outside, with Dirichlet data sampled where the grid line
crosses the circle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import spsolve

from .errors import DomainError, InvalidDomainError, NonConvergenceError

__all__ = [
    "TzitzeicaProblem",
    "TzitzeicaSolution",
    "Discretization",
    "discretize",
    "solve",
    "residual",
    "blaschke_metric",
    "constant_solution",
    "hyperbolic_constant_solution",
    "liouville_solution",
]

MAX_HYPERBOLIC_RADIUS = 0.95
_BACKGROUNDS = {"flat": "flat", "flatlocal": "flat",
                "hyperbolic": "hyperbolic", "hyperbolicdisk": "hyperbolic"}

Scalar = Union[float, int]
# |q|^2 may be a constant, an (n, n) array on the grid or a function of (x, y)
QSpec = Union[Scalar, np.ndarray, Callable]
BoundarySpec = Union[Scalar, Callable]


@dataclass(frozen=True)
class TzitzeicaProblem:
    background: str = "flat"
    q_modulus_sq: QSpec = 0.0
    radius: float = 1.0
    grid_n: int = 65
    boundary: BoundarySpec = 0.0
    H: int = 1

    def __post_init__(self):
        if self.H != 1:
            raise DomainError("only hyperbolic affine spheres (H = 1) are supported")
        key = str(self.background).lower()
        if key not in _BACKGROUNDS:
            raise InvalidDomainError(f"unknown background {self.background!r}")
        object.__setattr__(self, "background", _BACKGROUNDS[key])
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise InvalidDomainError("radius must be positive")
        if self.background == "hyperbolic" and self.radius > MAX_HYPERBOLIC_RADIUS:
            raise InvalidDomainError(f"hyperbolic disk radius must be <= {MAX_HYPERBOLIC_RADIUS}")
        if self.grid_n < 17 or self.grid_n % 2 == 0:
            raise InvalidDomainError("grid_n must be an odd integer >= 17")

    @classmethod
    def from_cubic_differential(cls, q, **kwargs) -> "TzitzeicaProblem":
        """Build a problem from complex values of q; only ``|q|^2`` is kept."""
        if callable(q):
            return cls(q_modulus_sq=lambda x, y: np.abs(q(x, y)) ** 2, **kwargs)
        return cls(q_modulus_sq=np.abs(np.asarray(q)) ** 2, **kwargs)


@dataclass
class Discretization:
    """Grid geometry and the affine Laplacian ``Δu ≈ A u_int + b``."""

    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    q_sq: np.ndarray  # on interior nodes
    weight: np.ndarray  # coefficient of the Laplacian on interior nodes
    c1: float
    c2: float
    c0: float
    h: float = 0.0


@dataclass
class TzitzeicaSolution:
    u: np.ndarray  # (n, n); NaN at nodes that are not unknowns
    residual_inf: float
    newton_iters: int
    history: list = field(default_factory=list)


def _boundary_values(boundary, xs, ys):
    if callable(boundary):
        r = np.hypot(xs, ys)
        th = np.arctan2(ys, xs)
        return np.asarray(boundary(r, th), dtype=float) * np.ones_like(xs)
    return np.full_like(xs, float(boundary))


def discretize(p: TzitzeicaProblem) -> Discretization:
    n, R = p.grid_n, float(p.radius)
    h = 2 * R / (n - 1)
    coords = -R + h * np.arange(n)
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    rho = np.hypot(X, Y)
    # nodes closer than h/4 to the circle are not unknowns, so every cut arm
    # has length in [h/4, 5h/4] and stencil coefficients stay O(1/h^2)
    mask = rho < R - 0.25 * h
    index = -np.ones((n, n), dtype=np.int64)
    index[mask] = np.arange(mask.sum())
    N = int(mask.sum())

    rows, cols, vals = [], [], []
    b = np.zeros(N)
    bx, by, bk, bw = [], [], [], []  # boundary samples: point, row, weight
    diag = np.zeros(N)
    I, J = np.nonzero(mask)
    x0, y0 = X[I, J], Y[I, J]
    arms = {}
    for axis in (0, 1):
        for sign in (-1, 1):
            ni, nj = I + sign * (axis == 0), J + sign * (axis == 1)
            ok = (ni >= 0) & (ni < n) & (nj >= 0) & (nj < n)
            inside = np.zeros(N, dtype=bool)
            inside[ok] = mask[ni[ok], nj[ok]]
            # distance along this direction to the circle
            along, across = (x0, y0) if axis == 0 else (y0, x0)
            reach = np.sqrt(np.maximum(R * R - across * across, 0.0)) - sign * along
            dist = np.where(inside, h, reach)
            arms[axis, sign] = (dist, inside, ni, nj)
    for axis in (0, 1):
        dm, in_m, im, jm = arms[axis, -1]
        dp, in_p, ip, jp = arms[axis, 1]
        # Shortley-Weller: u'' ≈ 2/(dm+dp) [(u+ - u0)/dp - (u0 - u-)/dm]
        cm = 2.0 / (dm * (dm + dp))
        cp = 2.0 / (dp * (dm + dp))
        diag -= cm + cp
        for coef, dist, inside, ii, jj, sign in ((cm, dm, in_m, im, jm, -1), (cp, dp, in_p, ip, jp, 1)):
            k = np.nonzero(inside)[0]
            rows.append(k)
            cols.append(index[ii[k], jj[k]])
            vals.append(coef[k])
            kb = np.nonzero(~inside)[0]
            px = x0[kb] + sign * dist[kb] * (axis == 0)
            py = y0[kb] + sign * dist[kb] * (axis == 1)
            bx.append(px)
            by.append(py)
            bk.append(kb)
            bw.append(coef[kb])
    rows.append(np.arange(N))
    cols.append(np.arange(N))
    vals.append(diag)
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(N, N))
    bxs, bys = np.concatenate(bx), np.concatenate(by)
    gvals = _boundary_values(p.boundary, bxs, bys)
    np.add.at(b, np.concatenate(bk), np.concatenate(bw) * gvals)

    xi, yi = X[mask], Y[mask]
    q = p.q_modulus_sq
    if callable(q):
        q_sq = np.asarray(q(xi, yi), dtype=float) * np.ones(N)
    elif np.ndim(q) == 0:
        q_sq = np.full(N, float(q))
    else:
        q = np.asarray(q, dtype=float)
        if q.shape != (n, n):
            raise DomainError(f"|q|^2 grid has shape {q.shape}, expected {(n, n)}")
        q_sq = q[mask]
    if np.any(q_sq < 0) or not np.all(np.isfinite(q_sq)):
        raise DomainError("|q|^2 must be finite and nonnegative")

    if p.background == "flat":
        weight = np.ones(N)
        c1, c2, c0 = 8.0, 0.5, 0.0
    else:
        lam = 4.0 / (1.0 - (xi * xi + yi * yi)) ** 2
        weight = 2.0 / lam
        c1, c2, c0 = 2.0, 1.0, 1.0
    return Discretization(coords, coords, mask, A, b, q_sq, weight, c1, c2, c0, h)


def _operator(d: Discretization, v: np.ndarray) -> np.ndarray:
    return (d.weight * (d.A @ v + d.b) + d.c1 * d.q_sq * np.exp(-4 * v)
            - d.c2 * np.exp(2 * v) + d.c0)


def _jacobian(d: Discretization, v: np.ndarray) -> sp.csr_matrix:
    zeroth = -4 * d.c1 * d.q_sq * np.exp(-4 * v) - 2 * d.c2 * np.exp(2 * v)
    return (sp.diags(d.weight) @ d.A + sp.diags(zeroth)).tocsc()


def _embed(d: Discretization, v: np.ndarray) -> np.ndarray:
    u = np.full(d.mask.shape, np.nan)
    u[d.mask] = v
    return u


def residual(u: np.ndarray, p: TzitzeicaProblem, d: Discretization | None = None) -> float:
    """Max-norm of the discrete operator at interior nodes of the full grid ``u``."""
    d = d or discretize(p)
    u = np.asarray(u, dtype=float)
    if u.shape != d.mask.shape:
        raise DomainError(f"u has shape {u.shape}, expected {d.mask.shape}")
    return float(np.max(np.abs(_operator(d, u[d.mask]))))


def solve(p: TzitzeicaProblem, tol: float = 1e-10, max_iters: int = 50,
          initial: Scalar | np.ndarray | None = None) -> TzitzeicaSolution:
    """Damped Newton iteration from ``initial`` (default: u = 0)."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    d = discretize(p)
    N = int(d.mask.sum())
    if initial is None:
        v = np.zeros(N)
    elif np.ndim(initial) == 0:
        v = np.full(N, float(initial))
    else:
        v = np.asarray(initial, dtype=float)[d.mask].copy()
    F = _operator(d, v)
    res = float(np.max(np.abs(F)))
    history = [res]
    it = 0
    while res >= tol:
        if it >= max_iters:
            raise NonConvergenceError(
                f"Newton did not reach tol={tol:g} in {max_iters} iterations (residual {res:.3e})",
                residual=res, iterate=_embed(d, v))
        step = spsolve(_jacobian(d, v), F)
        t = 1.0
        while True:
            trial = v - t * step
            F_trial = _operator(d, trial)
            r_trial = float(np.max(np.abs(F_trial)))
            if np.isfinite(r_trial) and r_trial < res or t < 1e-8:
                break
            t *= 0.5
        v, F, res = trial, F_trial, r_trial
        it += 1
        history.append(res)
        if not np.isfinite(res):
            raise NonConvergenceError("Newton iterate diverged", residual=res, iterate=_embed(d, v))
    return TzitzeicaSolution(_embed(d, v), res, it, history)


def blaschke_metric(sol: TzitzeicaSolution, p: TzitzeicaProblem) -> np.ndarray:
    """Conformal factor ``e^{2u}`` times the background factor (1 or 4/(1-ρ^2)^2)."""
    n, R = p.grid_n, float(p.radius)
    coords = -R + (2 * R / (n - 1)) * np.arange(n)
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    factor = np.exp(2 * sol.u)
    if p.background == "hyperbolic":
        factor = factor * 4.0 / (1.0 - (X * X + Y * Y)) ** 2
    return factor


def constant_solution(q_sq: float) -> float:
    """Constant solution of the flat equation: ``8 c e^{-4u} = e^{2u}/2``."""
    if q_sq <= 0:
        raise DomainError("a constant solution needs |q|^2 > 0")
    return float(np.log(16.0 * q_sq) / 6.0)


def hyperbolic_constant_solution(q_sq: float) -> float:
    """Constant solution of the hyperbolic equation for constant ``|Q|^2 = s``.

    With ``X = e^{2u}`` this solves ``2 s X^{-2} - X + 1 = 0``.
    """
    if q_sq < 0:
        raise DomainError("|Q|^2 must be nonnegative")
    if q_sq == 0:
        return 0.0
    f = lambda X: 2.0 * q_sq / (X * X) - X + 1.0
    hi = 2.0
    while f(hi) > 0:
        hi *= 2.0
    X = brentq(f, 1.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(0.5 * np.log(X))


def liouville_solution(x, y, r0: float = 2.0):
    """Exact solution of the flat equation with q = 0 on the disk of radius ``r0``.

    ``u = ½ log(8 r0^2 / (r0^2 - ρ^2)^2)``, so ``e^{2u}`` is a multiple of the
    Poincaré factor of that disk.
    """
    rho2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
    return 0.5 * np.log(8.0 * r0 * r0 / (r0 * r0 - rho2) ** 2)
