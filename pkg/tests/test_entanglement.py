import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpchain.entanglement import (
    ScanCapReached, entanglement_range, finite_negativity, limiting_state, max_entangled_system_size,
    negativity, negativity_case_c, omega9_negative, partial_transpose, pt_spectrum_thermo,
    thermo_negativity, validate_density_matrix,
)
from mpchain.model import ModelParams
from mpchain.observables import two_site_rdm, two_site_rdm_thermo

from conftest import SIGMAS


def _random_state(rng, d=9):
    X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    R = X @ X.conj().T
    return R / np.trace(R)


@given(st.integers(0, 2**31), st.sampled_from([0, 1]))
def test_partial_transpose_involution(seed, sub):
    R = _random_state(np.random.default_rng(seed))
    np.testing.assert_allclose(partial_transpose(partial_transpose(R, sub), sub), R)


def test_partial_transpose_index_map():
    R = np.arange(81.0).reshape(9, 9)
    pt = partial_transpose(R)
    # ((i,k),(j,l)) -> ((j,k),(i,l))
    assert pt[3 * 2 + 1, 3 * 0 + 2] == R[3 * 0 + 1, 3 * 2 + 2]


def test_both_partial_transposes_share_spectrum():
    R = _random_state(np.random.default_rng(1))
    a = np.linalg.eigvalsh(partial_transpose(R, 0))
    b = np.linalg.eigvalsh(partial_transpose(R, 1))
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_negativity_of_product_and_bell():
    p = np.diag([0.2, 0.5, 0.3])
    assert negativity(np.kron(p, p)).value == 0.0
    psi = np.zeros(9)
    psi[[0, 4, 8]] = 1 / math.sqrt(3)
    res = negativity(np.outer(psi, psi))
    assert res.value == pytest.approx(1.0)
    assert res.entangled


def test_negativity_validates_input():
    with pytest.raises(ValueError):
        negativity(np.eye(9))
    with pytest.raises(ValueError):
        validate_density_matrix(np.ones((3, 4)))


@pytest.mark.parametrize("g", [0.02, 0.1, 0.3, -0.2])
@pytest.mark.parametrize("r", [2, 3, 5, 9, 17, 30])
def test_omega_closed_form(g, r):
    spec = pt_spectrum_thermo(ModelParams(g, 1), r)
    numeric = np.linalg.eigvalsh(partial_transpose(two_site_rdm_thermo(ModelParams(g, 1), r)))
    np.testing.assert_allclose(np.sort(spec.omega), numeric, atol=1e-12)
    assert (spec.omega9 < 0) == omega9_negative(ModelParams(g, 1), r)
    assert np.all(np.delete(spec.omega, 8) >= -1e-15)


def test_range_anchor():
    rng = entanglement_range(ModelParams(0.02, 1))
    assert rng.exact == 15
    assert rng.approx == pytest.approx(15.7327, abs=1e-4)


@pytest.mark.parametrize("g", [0.01, 0.02, 0.05, 0.1, 0.3])
def test_range_matches_negativity(g):
    p = ModelParams(g, 1)
    r0 = entanglement_range(p).exact
    assert thermo_negativity(p, r0) > 0
    assert all(thermo_negativity(p, r) == 0 for r in range(r0 + 1, r0 + 20))


def test_range_undefined_at_criticality():
    with pytest.raises(ValueError, match="infinite range"):
        entanglement_range(ModelParams(0.0, 1))


def test_range_grows_as_g_shrinks():
    gs = [0.3, 0.1, 0.05, 0.02, 0.01, 0.005]
    ranges = [entanglement_range(ModelParams(g, 1)).exact for g in gs]
    assert ranges == sorted(ranges)
    assert ranges[-1] > ranges[0]


def test_nmax_cap_and_none():
    p = ModelParams(0.3, 1)
    with pytest.raises(ScanCapReached):
        max_entangled_system_size(p, 2, cap=60)
    assert max_entangled_system_size(p, 5, cap=60) is None
    with pytest.raises(ValueError):
        max_entangled_system_size(p, 1)


def test_nmax_finite_window():
    p = ModelParams(0.15, 1)
    nmax = max_entangled_system_size(p, 4, cap=100)
    assert nmax is not None
    assert finite_negativity(p, 4, nmax) > 0
    assert all(finite_negativity(p, 4, N) == 0 for N in range(nmax + 1, 100))


@pytest.mark.parametrize("N", [4, 6, 8])
def test_limiting_state_b_small_g(N):
    from mpchain.oracle import dense_state

    g = 1e-5
    psi = limiting_state(ModelParams(g, -1), N, "b")
    exact = dense_state(ModelParams(g, -1), N).amplitudes
    assert abs(abs(psi @ exact) - 1) < 1e-8


@pytest.mark.parametrize("N", [3, 5, 7])
def test_limiting_state_c_matches_oracle(N):
    from mpchain.oracle import dense_state

    psi = limiting_state(ModelParams(0.0, -1), N, "c")
    exact = dense_state(ModelParams(0.0, -1), N).amplitudes
    assert abs(abs(psi @ exact) - 1) < 1e-12


@pytest.mark.parametrize("case,sigma,N", [("a", -1, 4), ("b", 1, 4), ("b", -1, 5), ("c", -1, 4), ("z", 1, 4)])
def test_limiting_state_validation(case, sigma, N):
    with pytest.raises(ValueError):
        limiting_state(ModelParams(0.0, sigma), N, case)


@pytest.mark.parametrize("N", [5, 7, 9])
def test_case_c_only_for_neighbours(N):
    assert negativity_case_c(N, 2) == negativity_case_c(N, N)
    with pytest.raises(ValueError, match="neighbouring"):
        negativity_case_c(N, 3)


def test_case_c_far_pair_differs():
    # the neighbour closed form does not carry over to r = 3
    far = finite_negativity(ModelParams(0.0, -1), 3, 5)
    assert far == pytest.approx(0.0637, abs=1e-3)
    assert abs(far - negativity_case_c(5)) > 0.05


@pytest.mark.parametrize("sigma", SIGMAS)
def test_negativity_echo_fields(sigma):
    res = negativity(two_site_rdm(ModelParams(0.1, sigma), 3, 10))
    assert (res.r, res.N) == (3, 10)
    assert res.params.sigma == sigma
