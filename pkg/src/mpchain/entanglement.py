"""Partial transpose, negativity, entanglement range and limiting states."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import ConsistencyError, ModelParams
from .observables import TwoSiteRDM, two_site_rdm, two_site_rdm_thermo, thermo_elements

NEG_TOL = 1e-12
DEFAULT_NMAX_CAP = 500


@dataclass(frozen=True)
class NegativityResult:
    value: float
    pt_eigenvalues: np.ndarray
    negative_set: np.ndarray
    r: int | None = None
    N: float | None = None
    params: ModelParams | None = None

    @property
    def entangled(self) -> bool:
        return len(self.negative_set) > 0


@dataclass(frozen=True)
class PtSpectrum:
    omega: np.ndarray  # omega_1 .. omega_9 in labelled order
    r: int
    params: ModelParams

    @property
    def omega9(self) -> float:
        return float(self.omega[8])


def partial_transpose(rho, subsystem: int = 0, dims=(3, 3)) -> np.ndarray:
    """Transpose one factor of a bipartite matrix.

    With ``subsystem=0`` the entry ((i,k),(j,l)) moves to ((j,k),(i,l)).
    """
    R = rho.rho2 if isinstance(rho, TwoSiteRDM) else np.asarray(rho)
    dA, dB = dims
    T = R.reshape(dA, dB, dA, dB)
    if subsystem == 0:
        T = T.transpose(2, 1, 0, 3)
    elif subsystem == 1:
        T = T.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 0 or 1")
    return T.reshape(dA * dB, dA * dB)


def validate_density_matrix(R: np.ndarray, tol: float = 1e-10):
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ValueError("density matrix has non-finite entries")
    if abs(np.trace(R) - 1.0) > 1e-8:
        raise ValueError(f"trace {np.trace(R)!r} deviates from 1")
    if np.abs(R - R.conj().T).max() > tol:
        raise ValueError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(R).min() < -1e-9:
        raise ValueError("density matrix is not positive semidefinite")


def negativity_from_pt(pt: np.ndarray, tol: float = NEG_TOL, **echo) -> NegativityResult:
    """Negativity of a partially transposed matrix with both definitions cross-checked."""
    w = np.sort(np.linalg.eigvalsh((pt + pt.conj().T) / 2))
    negative = w[w < -tol]
    value = float(-negative.sum()) + 0.0  # no -0.0 for separable states
    trace_norm = float(np.abs(np.linalg.svd(pt, compute_uv=False)).sum())
    if abs((trace_norm - 1.0) / 2 - float(-w[w < 0].sum())) > 1e-12:
        raise ConsistencyError("trace-norm and negative-sum negativities disagree")
    return NegativityResult(value, w, negative, **echo)


def negativity(rho: TwoSiteRDM | np.ndarray, tol: float = NEG_TOL) -> NegativityResult:
    R = rho.rho2 if isinstance(rho, TwoSiteRDM) else np.asarray(rho)
    validate_density_matrix(R)
    echo = {}
    if isinstance(rho, TwoSiteRDM):
        echo = dict(r=rho.r, N=rho.N, params=rho.params)
    return negativity_from_pt(partial_transpose(R), tol, **echo)


def finite_negativity(params: ModelParams, r: int, N: int) -> float:
    return negativity(two_site_rdm(params, r, N)).value


def thermo_negativity(params: ModelParams, r: int) -> float:
    return negativity(two_site_rdm_thermo(params, r)).value


def pt_spectrum_thermo(params: ModelParams, r: int, check: bool = True) -> PtSpectrum:
    el = thermo_elements(params, r)
    al, be, ga, de, mu, nu = (el[k] for k in ("alpha", "beta", "gamma", "delta", "mu", "nu"))
    G = abs(params.g) * ga
    mid = (al + ga + nu) / 2
    rad = 0.5 * math.sqrt((al - ga + nu) ** 2 + 8 * mu * mu)
    omega = np.array([al, be, be, G + de, G + de, G - de, G - de, mid + rad, mid - rad])
    if check:
        numeric = np.linalg.eigvalsh(partial_transpose(two_site_rdm_thermo(params, r)))
        if np.abs(np.sort(omega) - numeric).max() > 1e-12:
            raise ConsistencyError(f"closed-form PT spectrum disagrees at g={params.g}, r={r}")
    return PtSpectrum(omega, r, params)


def omega9_negative(params: ModelParams, r: int) -> bool:
    """Sign test alpha*gamma < 2 mu^2 for the only eigenvalue that can go negative."""
    el = thermo_elements(params, r)
    return el["alpha"] * el["gamma"] < 2 * el["mu"] ** 2


@dataclass(frozen=True)
class EntanglementRange:
    exact: int
    approx: float


def entanglement_range(params: ModelParams) -> EntanglementRange:
    """Largest separation r with negative omega_9, plus ln(3)/(4|g|) + 2."""
    g = abs(params.g)
    if g == 0:
        raise ValueError("infinite range at criticality is not representable")
    L1, L2 = params.lam1, params.lam2
    q = L2 / L1
    # past m_max the condition 1 - q^m < 2 L1^(-2m) cannot hold any more
    m_bound = max(math.log(4.0) / (2 * math.log(L1)), math.log(2.0) / -math.log(abs(q)) if 0 < abs(q) < 1 else 1.0)
    m = np.arange(0, int(2 * m_bound) + 16)
    cond = 1.0 - q**m < 2.0 * L1 ** (-2.0 * m)
    exact = int(m[cond].max()) + 2
    return EntanglementRange(exact, math.log(3) / (4 * g) + 2)


class ScanCapReached(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"still entangled at the scan cap: N_max >= {cap}")
        self.cap = cap


def max_entangled_system_size(params: ModelParams, r: int, cap: int = DEFAULT_NMAX_CAP) -> int | None:
    """Largest ring size N with positive negativity between sites 1 and r.

    Rings are scanned from N = 2(r-1), the smallest size at which r-1 is the
    shorter ring distance between the two sites.  Returns None if the pair is
    never entangled; raises ScanCapReached if it is still entangled at ``cap``.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    last = None
    for N in range(max(2 * (r - 1), r, 2), cap + 1):
        if finite_negativity(params, r, N) > 0:
            last = N
    if last == cap:
        raise ScanCapReached(cap)
    return last


# --- limiting states near g = 0 ---------------------------------------------

MAX_DENSE_N = 12


def _basis_index(N: int, digits) -> int:
    idx = 0
    for d in digits:
        idx = 3 * idx + d
    return idx


def limiting_state(params: ModelParams, N: int, case: str) -> np.ndarray:
    """Normalized dense vector of the small-g limiting form (cases a, b, c).

    Digits: 0 <-> |+1>, 1 <-> |0>, 2 <-> |-1>, site 1 most significant.
    """
    if not 2 <= N <= MAX_DENSE_N:
        raise ValueError(f"dense limiting states need 2 <= N <= {MAX_DENSE_N}")
    s = params.sigma
    if case == "a" and s != 1:
        raise ValueError("case a requires sigma = +1")
    if case == "b" and (s != -1 or N % 2):
        raise ValueError("case b requires sigma = -1 and even N")
    if case == "c" and (s != -1 or N % 2 == 0):
        raise ValueError("case c requires sigma = -1 and odd N")
    if case not in ("a", "b", "c"):
        raise ValueError(f"unknown case {case!r}")

    psi = np.zeros(3**N)
    if case != "c":
        psi[_basis_index(N, [1] * N)] = 1.0
    for k, l in itertools.combinations(range(N), 2):
        up_down = [1] * N
        up_down[k], up_down[l] = 0, 2
        down_up = [1] * N
        down_up[k], down_up[l] = 2, 0
        if case == "a":
            c1 = c2 = -params.g
        elif case == "b":
            c1 = c2 = params.g * (-1) ** (l - k)
        else:
            c1, c2 = (-1) ** (l - k), -((-1) ** (l - k))
        psi[_basis_index(N, up_down)] += c1
        psi[_basis_index(N, down_up)] += c2
    return psi / np.linalg.norm(psi)


def negativity_case_c(N: int, r: int = 2) -> float:
    """Closed-form nearest-neighbour negativity of the odd-N, sigma = -1 state at g = 0."""
    if N % 2 == 0 or N < 3:
        raise ValueError("case c needs odd N >= 3")
    if not 2 <= r <= N:
        raise ValueError("need 2 <= r <= N")
    if min(r - 1, N - r + 1) != 1:
        raise ValueError("the closed form holds for neighbouring sites only (r = 2 or r = N)")
    x = (N - 2) * (N - 3)
    return abs(x - 1 - math.sqrt((x + 1) ** 2 + 8 * (N - 2) ** 2)) / (2 * N * (N - 1))
