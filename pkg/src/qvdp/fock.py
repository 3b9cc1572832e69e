"""Truncated Fock-space operator algebra and density-matrix validity checks.

All operators act on the lowest ``dim`` number states |0>, ..., |dim-1> and
are plain complex matrices (numpy arrays by default, scipy CSR on request).
Rates and coupling strengths are applied by callers; everything here is
dimensionless ladder algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidDimensionError

__all__ = [
    "annihilation",
    "creation",
    "number_operator",
    "fock_projector",
    "DensityDiagnostics",
    "validate_density",
]

# DensityMatrix invariant tolerances, shared by solvers and tests.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8


def annihilation(dim: int, sparse: bool = False):
    """Annihilation operator a with a|n> = sqrt(n)|n-1>, truncated to `dim` levels."""
    if dim < 2:
        raise InvalidDimensionError(f"need dim >= 2, got {dim}")
    off = np.sqrt(np.arange(1, dim, dtype=float))
    if sparse:
        return sp.diags(off.astype(complex), 1, shape=(dim, dim), format="csr")
    return np.diag(off.astype(complex), k=1)


def creation(dim: int, sparse: bool = False):
    """Creation operator a^dag, the conjugate transpose of `annihilation`."""
    a = annihilation(dim, sparse=sparse)
    return a.conj().T.tocsr() if sparse else a.conj().T.copy()


def number_operator(dim: int, sparse: bool = False):
    """Number operator a^dag a = diag(0, 1, ..., dim-1)."""
    if dim < 2:
        raise InvalidDimensionError(f"need dim >= 2, got {dim}")
    n = np.arange(dim, dtype=complex)
    if sparse:
        return sp.diags(n, 0, shape=(dim, dim), format="csr")
    return np.diag(n)


def fock_projector(dim: int, n: int) -> np.ndarray:
    """Projector |n><n| on the truncated basis, a valid density matrix."""
    if dim < 2:
        raise InvalidDimensionError(f"need dim >= 2, got {dim}")
    if not 0 <= n < dim:
        raise IndexError(f"level {n} outside truncated basis 0..{dim - 1}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return rho


@dataclass(frozen=True)
class DensityDiagnostics:
    """Defects of the three density-matrix invariants plus a pass flag."""

    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    ok: bool


def validate_density(
    rho: np.ndarray,
    hermiticity_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    positivity_tol: float = POSITIVITY_TOL,
) -> DensityDiagnostics:
    """Diagnose hermiticity, unit trace and positivity of a candidate state.

    Purely diagnostic: returns the three defects and flags a violation when
    any of them exceeds its tolerance. The minimum eigenvalue is computed on
    the Hermitian part of `rho` so that it stays meaningful even when the
    hermiticity check itself fails.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDimensionError(f"density matrix must be square, got shape {rho.shape}")
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    trace_defect = float(abs(np.trace(rho) - 1.0))
    sym = 0.5 * (rho + rho.conj().T)
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    ok = (
        herm_defect < hermiticity_tol
        and trace_defect < trace_tol
        and min_eig > -positivity_tol
    )
    return DensityDiagnostics(herm_defect, trace_defect, min_eig, ok)
