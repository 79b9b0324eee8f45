import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpchain.model import (
    SPLUS, SZ, SX, SY, ModelParams, build_site_matrices, check_symmetries, expected_spectrum,
    operator_transfer_matrix, spin_along, transfer_matrix, transfer_power,
)

from conftest import G_GRID, SIGMAS

g_values = st.floats(-1.5, 1.5, allow_nan=False)
sigmas = st.sampled_from(SIGMAS)


def test_site_matrices_literal():
    m = build_site_matrices(ModelParams(0.5, -1))
    s2 = math.sqrt(2)
    np.testing.assert_allclose(m[1], [[0, -s2 * 0.5], [0, 0]])
    np.testing.assert_allclose(m[0], [[1, 0], [0, -1]])
    np.testing.assert_allclose(m[-1], [[0, 0], [s2, 0]])
    assert m.stacked().shape == (3, 2, 2)


@pytest.mark.parametrize("sigma", [0, 2, 0.5])
def test_sigma_validation(sigma):
    with pytest.raises(ValueError):
        ModelParams(0.1, sigma)


@pytest.mark.parametrize("g", [math.nan, math.inf])
def test_g_validation(g):
    with pytest.raises(ValueError):
        ModelParams(g, 1)


@pytest.mark.parametrize("sigma", SIGMAS)
@pytest.mark.parametrize("g", G_GRID)
def test_spectrum_on_grid(g, sigma):
    p = ModelParams(g, sigma)
    eig = np.sort(transfer_matrix(build_site_matrices(p)).eigenvalues().real)
    np.testing.assert_allclose(eig, np.sort([1 + 2 * g, 1 - 2 * g, sigma, sigma]), atol=1e-12)
    np.testing.assert_allclose(np.sort(expected_spectrum(p)), eig, atol=1e-12)


@given(g_values, sigmas)
def test_spectrum_property(g, sigma):
    eig = np.sort(transfer_matrix(build_site_matrices(ModelParams(g, sigma))).eigenvalues().real)
    np.testing.assert_allclose(eig, np.sort([1 + 2 * g, 1 - 2 * g, sigma, sigma]), atol=1e-12)


@given(g_values, sigmas)
def test_symmetries_hold(g, sigma):
    p = ModelParams(g, sigma)
    rep = check_symmetries(build_site_matrices(p), p)
    assert rep.ok, rep.failures()


def test_symmetry_checker_detects_breaking():
    p = ModelParams(0.3, 1)
    m = build_site_matrices(p)
    broken = type(m)(m.A_plus, m.A_zero + np.array([[0, 0.1], [0, 0]]), m.A_minus)
    assert not check_symmetries(broken, p).ok


@given(g_values, sigmas, st.floats(0.2, 3.0), st.integers(0, 2**31))
def test_gauge_covariance(g, sigma, mu, seed):
    # A -> mu S A S^-1 rescales E by mu^2 and leaves its spectrum shape intact
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    Si = np.linalg.inv(S)
    m = build_site_matrices(ModelParams(g, sigma))
    A = np.array([mu * S @ a @ Si for a in m])
    E = sum(np.kron(a.conj(), a) for a in A)
    # characteristic polynomials: robust even when the sigma eigenvalue is defective
    ref = np.poly(transfer_matrix(m).E)
    got = np.poly(E / mu**2)
    np.testing.assert_allclose(got, ref, atol=1e-9 * np.linalg.cond(S) ** 2)


def test_operator_transfer_sz():
    p = ModelParams(0.5, 1)
    E = operator_transfer_matrix(build_site_matrices(p), SZ).E
    # only the +1 and -1 channels survive, with the bond-index pattern (0,3) and (3,0)
    expected = np.zeros((4, 4))
    expected[0, 3] = 2 * p.g**2
    expected[3, 0] = -2.0
    np.testing.assert_allclose(E, expected, atol=1e-15)


def test_spin1_algebra():
    np.testing.assert_allclose(SX @ SY - SY @ SX, 1j * SZ, atol=1e-15)
    np.testing.assert_allclose(SX @ SX + SY @ SY + SZ @ SZ, 2 * np.eye(3), atol=1e-15)
    assert SPLUS[0, 1] == pytest.approx(math.sqrt(2))
    np.testing.assert_allclose(spin_along(0.0), SX)


@pytest.mark.parametrize("n", [0, 1, 7, 40])
def test_transfer_power_small(n):
    T = transfer_matrix(build_site_matrices(ModelParams(0.3, -1)))
    P = transfer_power(T, n)
    assert P.log_scale == 0
    np.testing.assert_allclose(P.full(), np.linalg.matrix_power(T.E, n), rtol=1e-12)


def test_transfer_power_rescales_large():
    p = ModelParams(1.0, 1)
    T = transfer_matrix(build_site_matrices(p))
    P = transfer_power(T, 5000)
    assert P.log_scale > 0
    # tr E^N = 3^N + (-1)^N + 2 dominated by 3^N
    assert P.trace_log() == pytest.approx(5000 * math.log(3), rel=1e-12)


def test_transfer_power_negative():
    T = transfer_matrix(build_site_matrices(ModelParams(0.1, 1)))
    with pytest.raises(ValueError):
        transfer_power(T, -1)
