"""Lindblad model of the driven quantum van der Pol oscillator.

The master equation implemented here is

    drho/dt = -i[H, rho] + gamma1 D[a^dag]rho + gamma2 D[a^2]rho + kappa D[a]rho

with the rotating-frame Hamiltonian

    H = delta a^dag a + Omega (a + a^dag) + eta (a^2 + a^dag^2)

where gamma1 is the linear pump sustaining the limit cycle, gamma2 the
two-photon loss, kappa an extra single-photon loss channel, Omega a harmonic
drive and eta a squeezing drive. D[L]rho = L rho L^dag - {L^dag L, rho}/2.

Superoperators use column-stacking vectorization, vec(rho)[m + N*n] = rho[m, n],
so that A rho B -> (B^T kron A) vec(rho). Under this convention

    -i[H, .]  ->  -i (I kron H - H^T kron I)
    D[L]      ->  conj(L) kron L - (I kron L^dag L + (L^dag L)^T kron I) / 2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .errors import InvalidDimensionError, InvalidParamsError
from .fock import annihilation

__all__ = [
    "ModelParams",
    "Liouvillian",
    "hamiltonian",
    "dissipator",
    "dissipator_superop",
    "hamiltonian_superop",
    "build_liouvillian",
    "master_rhs",
    "vectorize",
    "unvectorize",
    "trace_indices",
    "default_truncation_start",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical rates and drive strengths, all in the same (user-chosen) rate unit.

    Conventionally gamma1 = 1 sets the scale; only ratios matter for the
    dimensionless observables computed downstream.
    """

    gamma1: float
    gamma2: float
    delta: float = 0.0
    omega: float = 0.0
    eta: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        vals = {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "delta": self.delta,
            "omega": self.omega,
            "eta": self.eta,
            "kappa": self.kappa,
        }
        for name, v in vals.items():
            if not math.isfinite(v):
                raise InvalidParamsError(f"{name} must be finite, got {v}")
        if self.gamma1 <= 0:
            raise InvalidParamsError(f"gamma1 must be > 0, got {self.gamma1}")
        if self.gamma2 <= 0:
            raise InvalidParamsError(f"gamma2 must be > 0, got {self.gamma2}")
        for name in ("omega", "eta", "kappa"):
            if vals[name] < 0:
                raise InvalidParamsError(f"{name} must be >= 0, got {vals[name]}")

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    @property
    def rate_scale(self) -> float:
        """Sum of all rates and strengths, the crudest inverse-time scale."""
        return (
            abs(self.delta) + self.omega + self.eta + self.gamma1 + self.gamma2 + self.kappa
        )


def hamiltonian(params: ModelParams, dim: int) -> np.ndarray:
    """Rotating-frame Hamiltonian delta*n + Omega*(a+a^dag) + eta*(a^2+a^dag^2)."""
    if dim < 2:
        raise InvalidDimensionError(f"need dim >= 2, got {dim}")
    if params.eta != 0.0 and dim < 3:
        raise InvalidDimensionError(
            f"squeezing couples |0> and |2>; need dim >= 3, got {dim}"
        )
    a = annihilation(dim)
    ad = a.conj().T
    h = params.delta * (ad @ a) + params.omega * (a + ad)
    if params.eta != 0.0:
        a2 = a @ a
        h = h + params.eta * (a2 + a2.conj().T)
    return h


def dissipator(L: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Lindblad dissipator D[L]rho = L rho L^dag - {L^dag L, rho}/2 (matrix form)."""
    L = np.asarray(L)
    rho = np.asarray(rho)
    if L.shape != rho.shape or L.shape[0] != L.shape[1]:
        raise InvalidDimensionError(
            f"operator/state shape mismatch: {L.shape} vs {rho.shape}"
        )
    LdL = L.conj().T @ L
    return L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)


def master_rhs(params: ModelParams, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation evaluated term by term.

    Direct matrix-algebra evaluation, independent of the vectorized
    Liouvillian; used as an oracle in tests and available for single-step
    checks.
    """
    dim = rho.shape[0]
    a = annihilation(dim)
    h = hamiltonian(params, dim)
    out = -1j * (h @ rho - rho @ h)
    out = out + params.gamma1 * dissipator(a.conj().T, rho)
    out = out + params.gamma2 * dissipator(a @ a, rho)
    if params.kappa != 0.0:
        out = out + params.kappa * dissipator(a, rho)
    return out


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: vec[m + N*n] = rho[m, n]."""
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of `vectorize`."""
    return np.asarray(vec).reshape((dim, dim), order="F")


def trace_indices(dim: int) -> np.ndarray:
    """Positions of the diagonal elements rho[n, n] inside vec(rho)."""
    return np.arange(dim) * (dim + 1)


def hamiltonian_superop(h, sparse_format: str = "csr") -> sp.spmatrix:
    """Superoperator of -i[H, .] under column-stacking vectorization."""
    h = sp.csr_matrix(h)
    eye = sp.identity(h.shape[0], dtype=complex, format="csr")
    return (-1j * (sp.kron(eye, h) - sp.kron(h.T, eye))).asformat(sparse_format)


def dissipator_superop(L, sparse_format: str = "csr") -> sp.spmatrix:
    """Superoperator of D[L] under column-stacking vectorization."""
    L = sp.csr_matrix(L)
    eye = sp.identity(L.shape[0], dtype=complex, format="csr")
    LdL = (L.conj().T @ L).tocsr()
    out = sp.kron(L.conj(), L) - 0.5 * (sp.kron(eye, LdL) + sp.kron(LdL.T, eye))
    return out.asformat(sparse_format)


@dataclass(frozen=True)
class Liouvillian:
    """Vectorized generator of the master equation on a truncated Fock space.

    `matrix` is the sparse N^2 x N^2 superoperator acting on column-stacked
    states; `params` records the physical parameters it was built from
    (None for hand-assembled generators in tests).
    """

    dim: int
    matrix: sp.spmatrix
    params: ModelParams | None = None

    @property
    def norm_max(self) -> float:
        """Largest entry magnitude, the scale used for residual thresholds."""
        if self.matrix.nnz == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix.data)))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Action of the generator on a matrix-shaped state."""
        return unvectorize(self.matrix @ vectorize(rho), self.dim)


def build_liouvillian(params: ModelParams, dim: int) -> Liouvillian:
    """Assemble the sparse Liouvillian of the model at truncation `dim`."""
    if dim < 3:
        raise InvalidDimensionError(f"need dim >= 3, got {dim}")
    a = annihilation(dim, sparse=True)
    ad = a.conj().T.tocsr()
    mat = hamiltonian_superop(hamiltonian(params, dim))
    mat = mat + params.gamma1 * dissipator_superop(ad)
    mat = mat + params.gamma2 * dissipator_superop(a @ a)
    if params.kappa != 0.0:
        mat = mat + params.kappa * dissipator_superop(a)
    return Liouvillian(dim=dim, matrix=mat.tocsr(), params=params)


def default_truncation_start(params: ModelParams) -> int:
    """Starting truncation for the adaptive rule, max(6, ceil(2*gamma1/gamma2) + 10).

    The leading term tracks the undriven limit-cycle occupation
    gamma1/(2*gamma2) with a factor-4 safety margin.
    """
    return max(6, math.ceil(4.0 * params.gamma1 / (2.0 * params.gamma2)) + 10)
