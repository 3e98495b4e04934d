import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from trinion.cone import (
    ConeGeometry,
    central_first_difference,
    central_second_difference,
    ma_metric_closed_form,
    ma_metric_coeffs,
    phi,
    phi_prime,
    phi_second,
    semiflat_assemble,
    verify_monge_ampere,
)
from trinion.errors import DomainError

SWEEP = np.linspace(0.01, 0.99, 100)


def test_phi_prime_values():
    assert phi_prime(ConeGeometry(2, 1, 0.5)) == pytest.approx(-(7 / 8) ** (1 / 3), rel=1e-15)
    assert phi_prime(ConeGeometry(2, -1, 1.0)) == pytest.approx(2 ** (1 / 3), rel=1e-15)


def test_metric_coefficients_at_half():
    c_rr, c_base = ma_metric_coeffs(ConeGeometry(2, 1, 0.5))
    assert c_rr == pytest.approx((7 / 8) ** (-2 / 3) / 4, rel=1e-14)
    assert c_base == pytest.approx(0.5 * (7 / 8) ** (1 / 3), rel=1e-14)


def test_metric_degenerates_at_boundary():
    c_rr, c_base = ma_metric_coeffs(ConeGeometry(2, 1, 1 - 1e-12))
    assert c_rr > 1e7 and c_base < 1e-3


def test_phi_against_closed_form_n1():
    # n = 1, H = 1: phi = -(r sqrt(1-r^2) + arcsin r) / 2
    r = 0.6
    exact = -(r * np.sqrt(1 - r * r) + np.arcsin(r)) / 2
    assert phi(ConeGeometry(1, 1, r)) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("H", [1, -1])
def test_monge_ampere_identity(n, H):
    worst = max(verify_monge_ampere(ConeGeometry(n, H, float(r))) for r in SWEEP)
    assert worst < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("H", [1, -1])
def test_closed_form_matches_coefficients(n, H):
    for r in SWEEP[::7]:
        c = ConeGeometry(n, H, float(r))
        np.testing.assert_allclose(ma_metric_coeffs(c), ma_metric_closed_form(c), rtol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("H", [1, -1])
def test_convexity_and_quadrature_derivative(n, H):
    for r in SWEEP:
        c = ConeGeometry(n, H, float(r))
        assert phi_second(c) > 0
        assert central_second_difference(c) == pytest.approx(phi_second(c), rel=1e-6)
        assert central_first_difference(c) == pytest.approx(phi_prime(c), rel=1e-6)


def test_plain_central_difference_of_phi():
    c = ConeGeometry(2, 1, 0.4)
    h = 1e-4
    fd = (phi(c.at(0.4 + h)) - phi(c.at(0.4 - h))) / (2 * h)
    assert fd == pytest.approx(phi_prime(c), rel=1e-7)


@settings(max_examples=50)
@given(st.integers(1, 4), st.floats(0.05, 0.95), st.integers(0, 2 ** 32 - 1))
def test_monge_ampere_with_general_base_metric(n, r, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    gB = a @ a.T + n * np.eye(n)
    assert verify_monge_ampere(ConeGeometry(n, 1, r), gB) < 1e-11


@pytest.mark.parametrize("kw", [
    {"n": 0, "H": 1, "r": 0.5},
    {"n": 2, "H": 0, "r": 0.5},
    {"n": 2, "H": 1, "r": 1.0},
    {"n": 2, "H": 1, "r": -0.1},
])
def test_invalid_geometry(kw):
    with pytest.raises(DomainError):
        ConeGeometry(**kw)


def test_elliptic_sign_allows_r_beyond_one():
    assert verify_monge_ampere(ConeGeometry(2, -1, 1.5)) < 1e-12


spd_seed = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=100)
@given(st.integers(1, 5), spd_seed)
def test_semiflat_invariants_exact(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    gB = a @ a.T + 0.1 * np.eye(n)
    gB = (gB + gB.T) / 2
    sample = semiflat_assemble(gB)
    assert all(v == 0.0 for v in sample.invariant_defects().values())
    m = 2 * n
    v, w = np.random.default_rng(seed + 1).normal(size=(2, m))
    J, g = sample.J, sample.g
    assert (J @ v) @ g @ (J @ w) == pytest.approx(v @ g @ w, rel=1e-12, abs=1e-12)


def test_semiflat_from_monge_ampere_sample():
    c_rr, c_base = ma_metric_coeffs(ConeGeometry(2, 1, 0.5))
    gB = np.diag([c_base, c_base, c_rr])
    sample = semiflat_assemble(gB)
    assert np.array_equal(sample.g[:3, :3], gB) and np.array_equal(sample.g[3:, 3:], gB)
    assert all(v == 0.0 for v in sample.invariant_defects().values())


@pytest.mark.parametrize("base", [
    [[1.0, 2.0], [0.0, 1.0]],
    [[1.0, 0.0], [0.0, -1.0]],
    [1.0, 2.0],
])
def test_semiflat_rejects_bad_base(base):
    with pytest.raises(DomainError):
        semiflat_assemble(base)


@given(arrays(np.float64, 3, elements=st.floats(0.1, 10)))
def test_semiflat_diagonal_bases(d):
    sample = semiflat_assemble(np.diag(d))
    assert np.array_equal(np.diag(sample.g), np.concatenate([d, d]))
