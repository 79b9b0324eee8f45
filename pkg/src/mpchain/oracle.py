"""Brute-force dense-state reference for small rings.

Amplitudes are traces of products of 2x2 site matrices, enumerated over all
3^N index strings (site-major base 3, digit 0 <-> |+1>, 1 <-> |0>, 2 <-> |-1>).
Nothing here touches transfer matrices, so it serves as an independent check
on every finite-N contraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import NEG_TOL, NegativityResult, negativity_from_pt
from .hamiltonian import HamiltonianWeights, assemble_chain
from .model import SIGMA_PLUS, SQRT2, ModelParams, build_site_matrices

MAX_ORACLE_N = 12


@dataclass(frozen=True)
class DenseState:
    amplitudes: np.ndarray
    N: int
    params: ModelParams
    norm: float
    # lowest power of g kept when the state vanishes identically (g = 0)
    leading_order: int | None = None

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((3,) * self.N)


def _trace_products(A: np.ndarray, N: int) -> np.ndarray:
    """tr(A_{i1} ... A_{iN}) for every index string, site 1 slowest."""
    P = A.copy()  # (3, 2, 2)
    for _ in range(N - 1):
        P = np.einsum("sab,mbc->smac", P, A).reshape(-1, 2, 2)
    return np.einsum("saa->s", P)


def _plus_counts(N: int) -> np.ndarray:
    digits = np.indices((3,) * N).reshape(N, -1)
    return (digits == 0).sum(axis=0)


def dense_state(params: ModelParams, N: int) -> DenseState:
    """Normalized MPS amplitudes on the N-ring.

    At g = 0 with sigma = -1 and odd N every trace vanishes; the state is then
    taken as its g -> 0 limit, i.e. the lowest power of g with non-zero
    amplitudes, computed with A_{+1} stripped of its factor g.
    """
    if not 2 <= N <= MAX_ORACLE_N:
        raise ValueError(f"dense oracle supports 2 <= N <= {MAX_ORACLE_N}, got {N}")
    A = build_site_matrices(params).stacked()
    amps = _trace_products(A, N)
    order = None
    if not np.any(amps):
        stripped = A.copy()
        stripped[0] = -SQRT2 * SIGMA_PLUS
        raw = _trace_products(stripped, N)
        counts = _plus_counts(N)
        order = int(counts[raw != 0].min())
        amps = np.where(counts == order, raw, 0.0)
    norm = float(np.linalg.norm(amps))
    return DenseState(amps / norm, N, params, norm, order)


def dense_rdm(state: DenseState, sites) -> np.ndarray:
    """Partial trace onto ``sites`` (1-based), basis ordered by the given list."""
    sites = list(sites)
    N = state.N
    if len(set(sites)) != len(sites) or not all(1 <= s <= N for s in sites):
        raise ValueError(f"invalid sites {sites} for N={N}")
    if 3 ** len(sites) > 3**4:
        raise ValueError("at most four sites")
    keep = [s - 1 for s in sites]
    T = np.moveaxis(state.tensor(), keep, list(range(len(keep))))
    T = T.reshape(3 ** len(keep), -1)
    return T @ T.conj().T


def dense_negativity(state: DenseState, site1: int, site2: int, tol: float = NEG_TOL) -> NegativityResult:
    R = dense_rdm(state, [site1, site2])
    pt = R.reshape(3, 3, 3, 3).transpose(2, 1, 0, 3).reshape(9, 9)
    r = (site2 - site1) % state.N + 1
    return negativity_from_pt(pt, tol, r=r, N=state.N, params=state.params)


def dense_energy(params: ModelParams, weights: HamiltonianWeights, N: int, state: DenseState | None = None) -> float:
    """||H psi|| / ||psi|| for the exact MPS state."""
    state = state or dense_state(params, N)
    H = assemble_chain(params, weights, N)
    psi = state.amplitudes
    return float(np.linalg.norm(H.matvec(psi)) / np.linalg.norm(psi))
