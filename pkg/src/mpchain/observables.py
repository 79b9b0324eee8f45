"""Normalization, correlators and reduced density matrices.

Finite-N quantities are transfer-matrix contractions around the ring; the
thermodynamic ones are closed forms.  Contractions carry a truncated power
series in g.  Away from the degenerate point the series has a single term
(the ordinary numbers); at g = 0, sigma = -1, odd N the state vanishes
identically and every expectation value is defined as its g -> 0 limit, which
the series resolves as a ratio of the lowest non-vanishing orders.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SQRT2,
    SX,
    SZ,
    ModelParams,
    build_site_matrices,
    operator_transfer_matrix,
    transfer_matrix,
    transfer_power,
)

_SERIES_ORDER = 2


def is_degenerate(params: ModelParams, N: int) -> bool:
    """True where Z = tr(E^N) vanishes: g = 0, sigma = -1, N odd."""
    return params.g == 0.0 and params.sigma == -1 and N % 2 == 1


# --- truncated series contraction engine -----------------------------------


def _site_series(params: ModelParams, degenerate: bool) -> np.ndarray:
    """Site matrices as series coefficients in g, shape (K+1, 3, 2, 2).

    The non-degenerate branch rescales by 1/sqrt(Lambda_1) (a gauge scale, so
    normalized expectations are unchanged) to keep powers of E bounded.
    """
    if not degenerate:
        A = build_site_matrices(params).stacked() / math.sqrt(params.lam1)
        return A[None]
    A = np.zeros((_SERIES_ORDER + 1, 3, 2, 2))
    A[1, 0] = -SQRT2 * SIGMA_PLUS
    A[0, 1] = np.diag([1.0, float(params.sigma)])
    A[0, 2] = SQRT2 * SIGMA_MINUS
    return A


def _series_einsum(subscripts: str, *operands: np.ndarray) -> np.ndarray:
    """einsum over series operands; each carries a leading order axis."""
    K = operands[0].shape[0] - 1
    out = None
    for orders in itertools.product(range(K + 1), repeat=len(operands)):
        total = sum(orders)
        if total > K:
            continue
        term = np.einsum(subscripts, *(op[o] for op, o in zip(operands, orders)))
        if out is None:
            out = np.zeros((K + 1,) + np.shape(term), dtype=np.result_type(term, float))
        out[total] += term
    return out


def _series_matmul(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return _series_einsum("ab,bc->ac", X, Y)


def _series_power(X: np.ndarray, n: int) -> np.ndarray:
    if X.shape[0] == 1:
        return np.linalg.matrix_power(X[0], n)[None]
    result = np.zeros_like(X)
    result[0] = np.eye(X.shape[1])
    base = X
    while n:
        if n & 1:
            result = _series_matmul(result, base)
        n >>= 1
        if n:
            base = _series_matmul(base, base)
    return result


def _pair_series(A: np.ndarray) -> np.ndarray:
    """B[:, a, b] = kron(conj(A_a), A_b) (bra copy first), shape (K+1, 3, 3, 4, 4)."""
    K1 = A.shape[0]
    B = np.zeros((K1, 3, 3, 4, 4), dtype=A.dtype)
    for a in range(K1):
        for b in range(K1 - a):
            B[a + b] += np.einsum("ixy,jzw->ijxzyw", A[a].conj(), A[b]).reshape(3, 3, 4, 4)
    return B


def _transfer_series(B: np.ndarray) -> np.ndarray:
    return np.einsum("kmmab->kab", B)


def _dressed_series(B: np.ndarray, O: np.ndarray) -> np.ndarray:
    return np.einsum("ij,kijab->kab", np.asarray(O), B)


def _leading_ratio(num: np.ndarray, Z: np.ndarray, tol: float = 1e-300) -> np.ndarray:
    """num / Z at the lowest order where Z does not vanish."""
    nz = np.flatnonzero(np.abs(Z) > tol)
    if len(nz) == 0:
        raise ZeroDivisionError("normalization vanishes to all computed orders")
    k0 = nz[0]
    return num[k0] / Z[k0]


@dataclass
class _Chain:
    """Cached series data for one (params, N)."""

    params: ModelParams
    N: int
    A: np.ndarray = field(init=False)
    B: np.ndarray = field(init=False)
    E: np.ndarray = field(init=False)
    Z: np.ndarray = field(init=False)

    def __post_init__(self):
        self.A = _site_series(self.params, is_degenerate(self.params, self.N))
        self.B = _pair_series(self.A)
        self.E = _transfer_series(self.B)
        self.Z = np.einsum("kaa->k", _series_power(self.E, self.N))

    def power(self, n: int) -> np.ndarray:
        return _series_power(self.E, n)

    def expectation(self, insertions: dict[int, np.ndarray]) -> complex:
        """<prod_k O_k> for operators inserted at 1-based ring sites."""
        sites = sorted(insertions)
        if any(not 1 <= s <= self.N for s in sites):
            raise ValueError(f"sites {sites} outside 1..{self.N}")
        if not sites:
            return 1.0
        M = None
        for idx, s in enumerate(sites):
            nxt = sites[idx + 1] if idx + 1 < len(sites) else sites[0] + self.N
            seg = _series_matmul(_dressed_series(self.B, insertions[s]), self.power(nxt - s - 1))
            M = seg if M is None else _series_matmul(M, seg)
        num = np.einsum("kaa->k", M)
        val = _leading_ratio(num, self.Z)
        return float(np.real(val)) if abs(np.imag(val)) < 1e-15 else complex(val)

    def pair_rdm(self, s1: int, s2: int) -> np.ndarray:
        """9x9 RDM of sites s1 < s2, rho[(i,k),(j,l)] = <i k|rho|j l>."""
        if not 1 <= s1 < s2 <= self.N:
            raise ValueError(f"need 1 <= s1 < s2 <= N, got ({s1}, {s2}, N={self.N})")
        P = self.power(s2 - s1 - 1)
        Q = self.power(self.N - (s2 - s1) - 1)
        # bra copy carries (j, l), ket copy carries (i, k)
        num = _series_einsum("jixy,yz,lkzw,wx->ikjl", self.B, P, self.B, Q)
        rho = _leading_ratio(num, self.Z)
        return np.real_if_close(rho).reshape(9, 9)


# --- data types -------------------------------------------------------------


@dataclass(frozen=True)
class OneSiteRDM:
    rho1: np.ndarray
    a: float
    b: float
    N: float
    params: ModelParams


@dataclass(frozen=True)
class TwoSiteRDM:
    rho2: np.ndarray
    r: int
    N: float
    params: ModelParams
    thermo: bool = False

    @property
    def elements(self) -> dict[str, float]:
        """Values in the slots of the symmetry pattern (alpha..nu)."""
        R = self.rho2
        return {
            "alpha": R[0, 0],
            "beta": R[2, 2],
            "gamma": R[4, 4],
            "delta": R[2, 4],
            "mu": R[1, 3],
            "nu": R[2, 6],
        }

    def residuals(self) -> dict[str, float]:
        R = self.rho2
        m = np.array([1, 0, -1])
        msum = (m[:, None] + m[None, :]).ravel()
        selection = np.abs(R[msum[:, None] != msum[None, :]]).max()
        flip = np.arange(9).reshape(3, 3)[::-1, ::-1].ravel()
        return {
            "trace": abs(np.trace(R) - 1.0),
            "symmetry": np.abs(R - R.T).max(),
            "min_eigenvalue": float(np.linalg.eigvalsh(R).min()),
            "selection_rule": float(selection),
            "parity": float(np.abs(R - R[np.ix_(flip, flip)]).max()),
        }


@dataclass(frozen=True)
class CorrelatorValue:
    value: float
    kind: str
    r: int
    N: float


# --- normalization and correlators -----------------------------------------


def partition_function(params: ModelParams, N: int, log: bool = False) -> float:
    """Z = (1+2|g|)^N + (1-2|g|)^N + 2 sigma^N; with ``log`` returns ln Z."""
    if N < 1:
        raise ValueError("N must be >= 1")
    L1, L2, s = params.lam1, params.lam2, params.sigma
    if not log:
        return L1**N + L2**N + 2.0 * s**N
    rest = 1.0 + (L2 / L1) ** N + 2.0 * (s / L1) ** N
    return N * math.log(L1) + (math.log(rest) if rest > 0 else -math.inf)


def partition_function_transfer(params: ModelParams, N: int, log: bool = False) -> float:
    """tr(E^N) by matrix powers.  Cross-check route for Z; use ``log`` for large N."""
    P = transfer_power(transfer_matrix(build_site_matrices(params)), N)
    if log:
        return P.trace_log()
    if P.log_scale:
        raise OverflowError(f"Z overflows at N={N}; pass log=True")
    return float(np.trace(P.full()).real)


def _check_N(N) -> bool:
    """True for the thermodynamic limit."""
    if N is None or N == math.inf:
        return True
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2 or inf, got {N!r}")
    return False


def one_point(params: ModelParams, N: int, O: np.ndarray, k: int = 1) -> float:
    return _Chain(params, N).expectation({k: O})


def two_point(params: ModelParams, N: int, O1: np.ndarray, O2: np.ndarray, r: int, first: int = 1) -> float:
    if not 2 <= r <= N:
        raise ValueError(f"need 2 <= r <= N, got r={r}, N={N}")
    chain = _Chain(params, N)
    s2 = (first + r - 2) % N + 1
    if s2 < first:
        return chain.expectation({s2: O2, first: O1})
    return chain.expectation({first: O1, s2: O2})


def _check_r(r: int, N=None):
    if int(r) != r or r < 2:
        raise ValueError(f"r must be an integer >= 2, got {r!r}")
    if N is not None and N != math.inf and r > N:
        raise ValueError(f"r={r} exceeds N={N}")


def two_point_zz(params: ModelParams, r: int, N=None) -> CorrelatorValue:
    """<S^z_1 S^z_r>; thermodynamic closed form when N is None/inf."""
    _check_r(r, N)
    if _check_N(N):
        g = params.g
        # singular prefactor 1/(1-2|g|)^2 cancelled against the r-th power
        val = -4 * g * g * params.lam2 ** (r - 2) / params.lam1**r
        return CorrelatorValue(val, "zz", r, math.inf)
    return CorrelatorValue(two_point(params, N, SZ, SZ, r), "zz", r, N)


def two_point_transverse(params: ModelParams, r: int, N=None) -> CorrelatorValue:
    """<S^n_1 S^n_r> for an in-plane unit vector n (S^x used at finite N).

    Vanishes identically when sigma == sign(g); sign(0) is taken as 0, the
    |g| prefactor kills that case anyway.
    """
    _check_r(r, N)
    if _check_N(N):
        g, s = params.g, params.sigma
        sign = (g > 0) - (g < 0)
        val = 2 * abs(g) * (s - sign) * (s / params.lam1) ** r
        return CorrelatorValue(val, "transverse", r, math.inf)
    return CorrelatorValue(two_point(params, N, SX, SX, r), "transverse", r, N)


# --- reduced density matrices ------------------------------------------------


def one_site_rdm(params: ModelParams, N=None) -> OneSiteRDM:
    """diag(a, 1-2a, a) from the closed form for a."""
    g = abs(params.g)
    if _check_N(N):
        a = g / params.lam1
    elif is_degenerate(params, N):
        # g -> 0 limit: both numerator and Z are 4(N-1)g^2 * (1, N)
        a = 1.0 / N
    else:
        L1, L2, s = params.lam1, params.lam2, params.sigma
        # divide through by L1^N to stay finite for large N
        num = (g / L1) * (1.0 - (L2 / L1) ** (N - 1))
        den = 1.0 + (L2 / L1) ** N + 2.0 * (s / L1) ** N
        a = num / den
    b = 1.0 - 2.0 * a
    return OneSiteRDM(np.diag([a, b, a]), a, b, N if N is not None else math.inf, params)


def one_site_rdm_transfer(params: ModelParams, N: int, k: int = 1) -> np.ndarray:
    """One-site RDM from the contraction <|j><i|>, for cross-checks."""
    chain = _Chain(params, N)
    rho = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            op = np.zeros((3, 3))
            op[j, i] = 1.0
            rho[i, j] = np.real(chain.expectation({k: op}))
    return rho


def _log(x, base):
    if base in ("e", math.e):
        return np.log(x)
    return np.log(x) / math.log(float(base))


def von_neumann_entropy(rho: np.ndarray, base=2) -> float:
    """-sum p log p over the spectrum of a density matrix (0 log 0 = 0)."""
    rho = np.asarray(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"trace {tr!r} deviates from 1")
    p = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if p.min() < -1e-9:
        raise ValueError(f"density matrix has eigenvalue {p.min():.3e} < 0")
    p = p[p > 0]
    return float(-(p * _log(p, base)).sum())


def one_site_entropy(params: ModelParams, N=None, base=2) -> float:
    rdm = one_site_rdm(params, N)
    p = np.array([rdm.a, rdm.a, rdm.b])
    p = p[p > 0]
    return float(-(p * _log(p, base)).sum())


def two_site_rdm(params: ModelParams, r: int, N: int, first_site: int = 1) -> TwoSiteRDM:
    """RDM of sites (first_site, first_site + r - 1) on the N-ring.

    Index convention: ``rho2[3*i + k, 3*j + l] = <i k| rho |j l>`` with i, j on
    the first site and k, l on the second, local order (+1, 0, -1).
    """
    _check_r(r, N)
    if _check_N(N):
        raise ValueError("finite N required; use two_site_rdm_thermo")
    if not 1 <= first_site <= N:
        raise ValueError("first_site out of range")
    chain = _Chain(params, N)
    s1, s2 = first_site, first_site + r - 1
    if s2 <= N:
        rho = chain.pair_rdm(s1, s2)
    else:
        # pair wraps around the ring: compute (s2 - N, s1) and swap the sites
        rho = chain.pair_rdm(s2 - N, s1)
        rho = rho.reshape(3, 3, 3, 3).transpose(1, 0, 3, 2).reshape(9, 9)
    return TwoSiteRDM(rho, r, N, params)


def thermo_elements(params: ModelParams, r: int) -> dict[str, float]:
    g, s = params.g, params.sigma
    L1, L2 = params.lam1, params.lam2
    return {
        "alpha": g * g * (L1 ** (r - 2) - L2 ** (r - 2)) / L1**r,
        "beta": g * g * (L1 ** (r - 2) + L2 ** (r - 2)) / L1**r,
        "gamma": 1.0 / L1**2,
        "delta": -g * (s / L1) ** r,
        "mu": s * abs(g) * (s / L1) ** r,
        "nu": 0.0,
    }


def two_site_rdm_thermo(params: ModelParams, r: int) -> TwoSiteRDM:
    _check_r(r)
    el = thermo_elements(params, r)
    G = abs(params.g) * el["gamma"]
    R = np.zeros((9, 9))
    R[0, 0] = R[8, 8] = el["alpha"]
    R[2, 2] = R[6, 6] = el["beta"]
    R[4, 4] = el["gamma"]
    for d in (1, 3, 5, 7):
        R[d, d] = G
    for i, j, key in ((1, 3, "mu"), (5, 7, "mu"), (2, 4, "delta"), (4, 6, "delta"), (2, 6, "nu")):
        R[i, j] = R[j, i] = el[key]
    return TwoSiteRDM(R, r, math.inf, params, thermo=True)
