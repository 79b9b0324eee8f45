"""Site matrices, symmetry checks and transfer matrices of the spin-1 MPS family.

Basis conventions used everywhere in the package:

* physical spin-1 basis ordered (|+1>, |0>, |-1>) <-> indices (0, 1, 2);
* Kronecker products ``kron(X, Y)`` with the first factor acting on the
  conjugated (bra) copy of the chain, row index ``(a, c) -> 2*a + c``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)

SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]])
SIGMA_MINUS = SIGMA_PLUS.T.copy()
BOND_SZ = np.diag([0.5, -0.5])

#: spin projections in basis order
M_VALUES = (1, 0, -1)


def _spin1_operators():
    sz = np.diag([1.0, 0.0, -1.0])
    splus = np.array([[0.0, SQRT2, 0.0], [0.0, 0.0, SQRT2], [0.0, 0.0, 0.0]])
    sminus = splus.T.copy()
    sx = (splus + sminus) / 2
    sy = (splus - sminus) / 2j
    return sx, sy, sz, splus, sminus


SX, SY, SZ, SPLUS, SMINUS = _spin1_operators()
IDENTITY3 = np.eye(3)


def spin_along(theta: float) -> np.ndarray:
    """Spin component along the in-plane unit vector (cos theta, sin theta, 0)."""
    return math.cos(theta) * SX + math.sin(theta) * SY


class ConsistencyError(RuntimeError):
    """Raised when two independent routes to the same quantity disagree."""


@dataclass(frozen=True)
class ModelParams:
    g: float
    sigma: int = 1

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma!r}")
        if not math.isfinite(self.g):
            raise ValueError(f"g must be finite, got {self.g!r}")
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "sigma", int(self.sigma))

    @property
    def lam1(self) -> float:
        """Dominant transfer eigenvalue 1 + 2|g|."""
        return 1.0 + 2.0 * abs(self.g)

    @property
    def lam2(self) -> float:
        return 1.0 - 2.0 * abs(self.g)


@dataclass(frozen=True)
class SiteMatrices:
    A_plus: np.ndarray
    A_zero: np.ndarray
    A_minus: np.ndarray

    def __iter__(self):
        return iter((self.A_plus, self.A_zero, self.A_minus))

    def __getitem__(self, m: int) -> np.ndarray:
        """Matrix for spin projection ``m`` in {+1, 0, -1}."""
        return {1: self.A_plus, 0: self.A_zero, -1: self.A_minus}[m]

    def stacked(self) -> np.ndarray:
        """Array of shape (3, 2, 2) in basis order."""
        return np.stack(list(self))


def build_site_matrices(params: ModelParams) -> SiteMatrices:
    g, s = params.g, params.sigma
    return SiteMatrices(
        A_plus=-SQRT2 * g * SIGMA_PLUS,
        A_zero=np.diag([1.0, float(s)]),
        A_minus=SQRT2 * SIGMA_MINUS,
    )


def spin_flip_matrix(params: ModelParams) -> np.ndarray:
    return np.array([[0.0, -params.sigma * params.g], [1.0, 0.0]])


@dataclass
class SymmetryReport:
    z_rotation: float
    spin_flip: float
    parity: float
    parity_matrix: np.ndarray
    tol: float = 1e-14

    @property
    def ok(self) -> bool:
        return max(self.z_rotation, self.spin_flip, self.parity) <= self.tol

    def failures(self) -> list[str]:
        names = ("z_rotation", "spin_flip", "parity")
        return [n for n in names if getattr(self, n) > self.tol]


def _signed_permutations():
    for perm in ((0, 1), (1, 0)):
        for signs in itertools.product((1.0, -1.0), repeat=2):
            P = np.zeros((2, 2))
            for row, (col, sg) in enumerate(zip(perm, signs)):
                P[row, col] = sg
            yield P


def check_symmetries(mats: SiteMatrices, params: ModelParams, tol: float = 1e-14) -> SymmetryReport:
    """Max-abs residuals of the z-rotation, spin-flip and parity relations.

    The spin flip is tested in intertwiner form ``X A_m - sigma A_{-m} X`` so
    that the check stays meaningful at g = 0, where X is singular.  The parity
    matrix is searched over the eight signed 2x2 permutations; the best one is
    reported.
    """
    z_res = max(
        np.abs(BOND_SZ @ mats[m] - mats[m] @ BOND_SZ - m * mats[m]).max() for m in M_VALUES
    )
    X = spin_flip_matrix(params)
    s = params.sigma
    flip_res = max(np.abs(X @ mats[m] - s * mats[-m] @ X).max() for m in M_VALUES)

    best, best_P = math.inf, None
    for P in _signed_permutations():
        Pinv = P.T  # signed permutations are orthogonal
        res = max(np.abs(mats[m].T - s * P @ mats[m] @ Pinv).max() for m in M_VALUES)
        if res < best:
            best, best_P = res, P
    return SymmetryReport(float(z_res), float(flip_res), float(best), best_P, tol)


@dataclass(frozen=True)
class TransferMatrix:
    E: np.ndarray
    operator: np.ndarray | None = field(default=None, compare=False)

    @property
    def dressed(self) -> bool:
        return self.operator is not None

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.E)


def transfer_matrix(mats: SiteMatrices) -> TransferMatrix:
    # site matrices are real, so the bra-side conjugation is the identity
    E = sum(np.kron(A.conj(), A) for A in mats)
    return TransferMatrix(E)


def operator_transfer_matrix(mats: SiteMatrices, O: np.ndarray) -> TransferMatrix:
    O = np.asarray(O)
    if O.shape != (3, 3):
        raise ValueError(f"operator must be 3x3, got shape {O.shape}")
    A = mats.stacked()
    E = sum(O[i, j] * np.kron(A[i].conj(), A[j]) for i in range(3) for j in range(3))
    if np.isrealobj(O) or np.abs(np.imag(E)).max() == 0:
        E = np.real(E)
    return TransferMatrix(E, operator=O)


def expected_spectrum(params: ModelParams) -> np.ndarray:
    """Sorted transfer spectrum {1+2g, 1-2g, sigma, sigma}."""
    g, s = params.g, params.sigma
    return np.sort(np.array([1 + 2 * g, 1 - 2 * g, s, s], dtype=float))


@dataclass(frozen=True)
class TransferPower:
    """``matrix * exp(log_scale)`` equals E^n."""

    matrix: np.ndarray
    log_scale: float = 0.0

    def trace_log(self) -> float:
        """log|tr(E^n)|; -inf when the trace vanishes."""
        t = np.trace(self.matrix).real
        return -math.inf if t == 0 else math.log(abs(t)) + self.log_scale

    def full(self) -> np.ndarray:
        return self.matrix * math.exp(self.log_scale)


def transfer_power(T: TransferMatrix, n: int, scale: float | None = None) -> TransferPower:
    """E^n by repeated squaring.

    If the unscaled power would leave double range, ``E / scale`` is powered
    instead (``scale`` defaults to the spectral radius) and ``n*log(scale)`` is
    reported as ``log_scale``.  n = 0 gives the identity.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    E = np.asarray(T.E)
    if not np.all(np.isfinite(E)):
        raise ValueError("transfer matrix has non-finite entries")
    if n == 0:
        return TransferPower(np.eye(E.shape[0], dtype=E.dtype))
    rho = max(np.abs(np.linalg.eigvals(E)).max(), 1e-300) if scale is None else scale
    if n * math.log(max(rho, 1.0)) < 600.0 and scale is None:
        return TransferPower(np.linalg.matrix_power(E, n))
    P = np.linalg.matrix_power(E / rho, n)
    return TransferPower(P, n * math.log(rho))
