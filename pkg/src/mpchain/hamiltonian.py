"""Parent Hamiltonian: null vectors, local projector sum, spin-operator form, ring assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .model import IDENTITY3, SX, SY, SZ, ConsistencyError, ModelParams, build_site_matrices

MAX_CHAIN_N = 12


@dataclass(frozen=True)
class HamiltonianWeights:
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise ValueError("projector weights must be non-negative")


@dataclass(frozen=True)
class CouplingConstants:
    J1: float
    J2: float
    J3: float
    J4: float
    J5: float
    J6: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.J1, self.J2, self.J3, self.J4, self.J5, self.J6)


@dataclass(frozen=True)
class NullVectors:
    vectors: np.ndarray  # (5, 9), rows e1..e5

    def __getitem__(self, i: int) -> np.ndarray:
        """1-based access, e[1] .. e[5]."""
        return self.vectors[i - 1]


def _ket(m1: int, m2: int) -> np.ndarray:
    idx = {1: 0, 0: 1, -1: 2}
    v = np.zeros(9)
    v[3 * idx[m1] + idx[m2]] = 1.0
    return v


def null_space_vectors(params: ModelParams) -> NullVectors:
    g, s = params.g, params.sigma
    e = np.array([
        _ket(1, 1),
        (_ket(1, 0) - s * _ket(0, 1)) / math.sqrt(2),
        (_ket(1, -1) + 2 * g * _ket(0, 0) + _ket(-1, 1)) / math.sqrt(2 + 4 * g * g),
        (_ket(0, -1) - s * _ket(-1, 0)) / math.sqrt(2),
        _ket(-1, -1),
    ])
    return NullVectors(e)


def pair_products(params: ModelParams) -> np.ndarray:
    """The 4x9 map c -> sum_kl c_kl A_k A_l, columns indexed 3k + l."""
    A = build_site_matrices(params).stacked()
    return np.einsum("kab,lbc->ackl", A, A).reshape(4, 9)


def null_residuals(params: ModelParams, null: NullVectors | None = None) -> np.ndarray:
    null = null or null_space_vectors(params)
    M = pair_products(params)
    return np.abs(M @ null.vectors.T).max(axis=0)


def numerical_null_space(params: ModelParams, tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (rows) of the kernel of ``pair_products`` via SVD."""
    M = pair_products(params)
    _, s, Vt = np.linalg.svd(M)
    rank = int((s > tol * max(s.max(), 1.0)).sum())
    return Vt[rank:]


def local_hamiltonian(params: ModelParams, weights: HamiltonianWeights) -> np.ndarray:
    e = null_space_vectors(params).vectors
    lam = np.array([weights.a, weights.b, weights.c, weights.b, weights.a])
    return np.einsum("a,ai,aj->ij", lam, e, e)


def coupling_constants(params: ModelParams, weights: HamiltonianWeights) -> CouplingConstants:
    g, s = params.g, params.sigma
    a, b, c = weights.a, weights.b, weights.c
    k = 1 + 2 * g * g
    return CouplingConstants(
        J1=-b * s * k,
        J2=c,
        J3=(a + b * s) * k,
        J4=(a + 2 * b * (s - 1)) * k + (1 + 2 * g) ** 2 * c,
        J5=2 * b * k + 2 * c * (1 - 4 * g * g),
        J6=-b * s * k - c * (1 + 2 * g),
    )


def _bond_operators():
    SS = np.real(sum(np.kron(S, S) for S in (SX, SY, SZ)))
    ZZ = np.kron(SZ, SZ)
    Z2 = SZ @ SZ
    return SS, ZZ, np.kron(Z2, IDENTITY3), np.kron(IDENTITY3, Z2)


class SpinForm(NamedTuple):
    matrix: np.ndarray
    shift: float


def _coupling_terms(J: CouplingConstants, single_site: np.ndarray) -> np.ndarray:
    SS, ZZ, _, _ = _bond_operators()
    return (
        J.J1 * SS
        + J.J2 * SS @ SS
        + J.J3 * ZZ
        + J.J4 * ZZ @ ZZ
        + J.J5 * single_site
        + J.J6 * (SS @ ZZ + ZZ @ SS)
    )


def spin_form_local(params: ModelParams, weights: HamiltonianWeights, tol: float = 1e-10) -> SpinForm:
    """Two-site spin-operator form, with S_z^2 symmetrized across the bond.

    Returns the matrix and the constant ``shift`` such that
    ``matrix == 2(1+2g^2) h + shift * I``; raises ConsistencyError otherwise.
    """
    _, _, Z2L, Z2R = _bond_operators()
    M = _coupling_terms(coupling_constants(params, weights), (Z2L + Z2R) / 2)
    target = 2 * (1 + 2 * params.g**2) * local_hamiltonian(params, weights)
    diff = M - target
    shift = float(np.trace(diff) / 9)
    err = np.abs(diff - shift * np.eye(9)).max()
    if err > tol:
        raise ConsistencyError(f"spin form differs from the projector form by {err:.3e}")
    return SpinForm(M, shift)


def _apply_bond(psi: np.ndarray, h4: np.ndarray, i: int, j: int) -> np.ndarray:
    """Apply a two-site operator (3,3,3,3) to sites i, j of psi (3,)*N + batch."""
    out = np.tensordot(h4, psi, axes=([2, 3], [i, j]))
    return np.moveaxis(out, [0, 1], [i, j])


def assemble_chain(
    params: ModelParams,
    weights: HamiltonianWeights,
    N: int,
    form: str = "projector",
) -> LinearOperator:
    """H = sum_l h_{l,l+1} on the periodic ring as an implicit operator.

    ``form="spin"`` assembles the coupling-constant form instead, with the
    single-site term J5 S_z^2 placed on the left site of each bond; it equals
    2(1+2g^2) H_projector + N * shift.  For N = 2 both bonds (1,2) and (2,1)
    are included.
    """
    if not 2 <= N <= MAX_CHAIN_N:
        raise ValueError(f"chain assembly supports 2 <= N <= {MAX_CHAIN_N}, got {N}")
    if form == "projector":
        h = local_hamiltonian(params, weights)
    elif form == "spin":
        _, _, Z2L, _ = _bond_operators()
        h = _coupling_terms(coupling_constants(params, weights), Z2L)
    else:
        raise ValueError(f"unknown form {form!r}")
    h4 = h.reshape(3, 3, 3, 3)
    dim = 3**N

    def matmat(X):
        X = np.asarray(X)
        batch = X.shape[1:] if X.ndim > 1 else ()
        psi = X.reshape((3,) * N + batch)
        out = np.zeros_like(psi, dtype=np.result_type(psi, h4))
        for l in range(N):
            out += _apply_bond(psi, h4, l, (l + 1) % N)
        return out.reshape((dim,) + batch)

    return LinearOperator((dim, dim), matvec=matmat, matmat=matmat, dtype=float)
