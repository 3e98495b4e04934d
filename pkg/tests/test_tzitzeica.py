import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trinion.errors import DomainError, InvalidDomainError, NonConvergenceError
from trinion.tzitzeica import (
    TzitzeicaProblem,
    blaschke_metric,
    constant_solution,
    discretize,
    hyperbolic_constant_solution,
    liouville_solution,
    residual,
    solve,
)


def grid(n, radius=1.0):
    x = np.linspace(-radius, radius, n)
    return np.meshgrid(x, x, indexing="ij")


def test_quarter_sixteenth_gives_zero_solution():
    sol = solve(TzitzeicaProblem("flat", 1 / 16, 1.0, 65, 0.0))
    assert np.nanmax(np.abs(sol.u)) < 1e-8
    assert sol.newton_iters == 0


@pytest.mark.parametrize("c", [0.01, 0.3, 2.0])
def test_constant_solution_recovered(c):
    uc = constant_solution(c)
    assert 8 * c * math.exp(-4 * uc) == pytest.approx(0.5 * math.exp(2 * uc), rel=1e-14)
    sol = solve(TzitzeicaProblem("flat", c, 1.0, 65, uc), initial=0.0)
    assert np.nanmax(np.abs(sol.u - uc)) < 1e-8
    assert sol.newton_iters < 30


def test_background_aliases():
    assert TzitzeicaProblem("FlatLocal").background == "flat"
    assert TzitzeicaProblem("HyperbolicDisk", radius=0.9).background == "hyperbolic"


def test_hyperbolic_zero_differential():
    sol = solve(TzitzeicaProblem("hyperbolic", 0.0, 0.9, 33, 0.0))
    assert np.nanmax(np.abs(sol.u)) == 0.0


@pytest.mark.parametrize("s", [0.1, 1.0])
def test_hyperbolic_constant_solution(s):
    uc = hyperbolic_constant_solution(s)
    X = math.exp(2 * uc)
    assert 2 * s / X ** 2 - X + 1 == pytest.approx(0, abs=1e-14)
    sol = solve(TzitzeicaProblem("hyperbolic", s, 0.9, 33, uc))
    assert np.nanmax(np.abs(sol.u - uc)) < 1e-8


def test_residual_values():
    z = np.zeros((33, 33))
    assert residual(z, TzitzeicaProblem("flat", 1 / 16, grid_n=33)) == 0.0
    assert residual(z, TzitzeicaProblem("flat", 1.0, grid_n=33)) == pytest.approx(7.5, rel=1e-15)
    assert residual(z, TzitzeicaProblem("hyperbolic", 0.0, 0.9, 33)) == 0.0


def test_blaschke_factor_of_hyperbolic_metric():
    p = TzitzeicaProblem("hyperbolic", 0.0, 0.9, 33, 0.0)
    sol = solve(p)
    X, Y = grid(33, 0.9)
    inside = ~np.isnan(sol.u)
    expected = 4.0 / (1.0 - X ** 2 - Y ** 2) ** 2
    np.testing.assert_allclose(blaschke_metric(sol, p)[inside], expected[inside], rtol=1e-14)


def test_blaschke_factor_of_constant_solution():
    c = 0.3
    uc = constant_solution(c)
    p = TzitzeicaProblem("flat", c, 1.0, 33, uc)
    factor = blaschke_metric(solve(p), p)
    np.testing.assert_allclose(factor[~np.isnan(factor)], math.exp(2 * uc), rtol=1e-9)


def test_liouville_second_order_convergence():
    errs = []
    for n in (33, 65, 129):
        p = TzitzeicaProblem("flat", 0.0, 1.0, n,
                             lambda r, th: liouville_solution(r * np.cos(th), r * np.sin(th)))
        sol = solve(p, tol=1e-10)
        X, Y = grid(n)
        errs.append(np.nanmax(np.abs(sol.u - liouville_solution(X, Y))))
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(1.8 <= r <= 2.2 for r in rates), rates


@pytest.mark.parametrize("phase", [1j, -1, -1j, np.exp(0.7j)])
def test_unimodular_rotation_bit_identical(phase):
    X, Y = grid(33)
    q = 0.3 * (X + 1j * Y) ** 2 + 0.2
    base = solve(TzitzeicaProblem.from_cubic_differential(q, grid_n=33))
    rotated = solve(TzitzeicaProblem.from_cubic_differential(q * phase, grid_n=33))
    if phase in (1j, -1, -1j):
        # exact rotations leave |q|^2 unchanged bit for bit
        assert np.array_equal(base.u, rotated.u, equal_nan=True)
    else:
        np.testing.assert_allclose(base.u, rotated.u, rtol=0, atol=1e-12)


def test_callable_differential_matches_array():
    X, Y = grid(33)
    f = lambda x, y: 0.4 * (x + 1j * y) + 0.1
    a = solve(TzitzeicaProblem.from_cubic_differential(f, grid_n=33))
    b = solve(TzitzeicaProblem.from_cubic_differential(f(X, Y), grid_n=33))
    np.testing.assert_allclose(a.u, b.u, rtol=0, atol=1e-14)


@settings(max_examples=15)
@given(st.floats(0.0, 2.0), st.floats(-0.5, 0.5))
def test_uniqueness_from_two_starts(q_sq, boundary):
    p = TzitzeicaProblem("flat", q_sq, 1.0, 17, boundary)
    tol = 1e-11
    a = solve(p, tol=tol, initial=0.0)
    b = solve(p, tol=tol, initial=boundary)
    assert np.nanmax(np.abs(a.u - b.u)) < 10 * tol


@settings(max_examples=15)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_monotone_in_differential(s1, extra):
    X, Y = grid(17)
    small = s1 * (1 + X ** 2)
    large = small + extra * (1 - Y ** 2)
    u1 = solve(TzitzeicaProblem("flat", small, 1.0, 17, 0.0), tol=1e-12).u
    u2 = solve(TzitzeicaProblem("flat", large, 1.0, 17, 0.0), tol=1e-12).u
    assert np.nanmin(u2 - u1) > -1e-10


def test_solution_is_rotation_symmetric_for_radial_data():
    sol = solve(TzitzeicaProblem("flat", 1.0, 1.0, 33, 0.0))
    u = sol.u
    np.testing.assert_allclose(u, u.T, rtol=0, atol=1e-12, equal_nan=True)
    np.testing.assert_allclose(u, u[::-1, :], rtol=0, atol=1e-12, equal_nan=True)


def test_discretization_excludes_nodes_near_circle():
    d = discretize(TzitzeicaProblem(grid_n=33))
    X, Y = np.meshgrid(d.x, d.y, indexing="ij")
    rho = np.hypot(X, Y)
    assert d.h == 2.0 / 32
    assert np.all(rho[d.mask] < 1 - d.h / 4)
    assert np.all(rho[~d.mask] >= 1 - d.h / 4)


def test_nonconvergence_reports_residual():
    with pytest.raises(NonConvergenceError) as info:
        solve(TzitzeicaProblem("flat", 1.0, grid_n=33), max_iters=1)
    assert info.value.residual > 1e-10
    assert info.value.iterate.shape == (33, 33)


@pytest.mark.parametrize("kw, err", [
    ({"H": -1}, DomainError),
    ({"grid_n": 32}, InvalidDomainError),
    ({"grid_n": 9}, InvalidDomainError),
    ({"radius": -1.0}, InvalidDomainError),
    ({"background": "hyperbolic", "radius": 1.0}, InvalidDomainError),
    ({"background": "spherical"}, InvalidDomainError),
])
def test_invalid_problems(kw, err):
    with pytest.raises(err):
        TzitzeicaProblem(**kw)


def test_negative_differential_rejected():
    with pytest.raises(DomainError):
        solve(TzitzeicaProblem(q_modulus_sq=-1.0, grid_n=17))
    with pytest.raises(DomainError):
        constant_solution(0.0)
