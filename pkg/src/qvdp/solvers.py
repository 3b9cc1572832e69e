"""Steady-state and time-domain solvers for the vectorized master equation.

The steady state is found with the trace-row replacement trick: the kernel
equation L vec(rho) = 0 is degenerate (the trace functional is a left null
vector of any trace-preserving generator), so one row belonging to a diagonal
element is replaced by the normalization Tr rho = 1 and the resulting square
system is solved with a sparse direct LU factorization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import (
    InstabilityError,
    InvalidParamsError,
    MultiplicityError,
    SolverError,
    StepSizeError,
    TruncationError,
)
from .fock import validate_density
from .model import (
    Liouvillian,
    ModelParams,
    build_liouvillian,
    default_truncation_start,
    trace_indices,
    unvectorize,
    vectorize,
)

__all__ = [
    "SteadySolution",
    "TruncationOptions",
    "steady_state",
    "steady_state_auto",
    "choose_truncation",
    "EvolveResult",
    "evolve",
    "kappa_slope",
]

logger = logging.getLogger(__name__)

RESIDUAL_RTOL = 1e-10
# Relative kernel-gap threshold below which the steady state is declared
# non-unique. Scaled by the largest Liouvillian entry; see steady_state().
GAP_RTOL = 1e-9


@dataclass(frozen=True)
class SteadySolution:
    """Steady state plus the diagnostics needed to trust it."""

    rho: np.ndarray
    residual: float
    dim: int
    uniqueness_gap: float

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho))


@dataclass(frozen=True)
class TruncationOptions:
    """Controls for the adaptive Fock-truncation loop."""

    tail_tol: float = 1e-9
    cap: int = 160
    start: int | None = None
    growth: float = 1.5
    dim: int | None = None  # fixed truncation, bypasses the adaptive loop


def _sigma_min(lu, n: int, iters: int = 12) -> float:
    """Smallest singular value of the factorized matrix via inverse power iteration.

    Runs on (A^H A)^{-1} using the existing LU factors, so it costs a handful
    of triangular solves. Deterministic start vector for reproducibility.
    """
    rng = np.random.default_rng(7)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma = np.inf
    for _ in range(iters):
        u = lu.solve(v, trans="H")
        w = lu.solve(u, trans="N")
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0.0:
            return 0.0
        v = w / nw
        sigma = 1.0 / math.sqrt(nw)
    return float(sigma)


def _kernel_dimension_dense(matrix: sp.spmatrix, scale: float) -> int:
    """Number of numerically-zero singular values, via dense SVD (small systems)."""
    svals = np.linalg.svd(matrix.toarray(), compute_uv=False)
    tol = max(scale, 1.0) * matrix.shape[0] * np.finfo(float).eps * 100
    return int(np.sum(svals < tol))


def steady_state(L: Liouvillian, gap_rtol: float = GAP_RTOL) -> SteadySolution:
    """Solve L vec(rho) = 0 with Tr rho = 1 by trace-row replacement and sparse LU.

    Verifies the residual against RESIDUAL_RTOL * max(1, ||L||_max) and the
    kernel uniqueness through the smallest singular value of the replaced
    system (estimated by inverse iteration on the LU factors).
    """
    dim = L.dim
    n = dim * dim
    mat = L.matrix.tocsr()
    scale = L.norm_max
    # Weight the normalization row to the mean magnitude of the generator's
    # entries so the replaced system stays well scaled.
    weight = float(np.mean(np.abs(mat.data))) if mat.nnz else 1.0
    diag = trace_indices(dim)
    trace_row = sp.csr_matrix(
        (np.full(dim, weight, dtype=complex), (np.zeros(dim, dtype=int), diag)),
        shape=(1, n),
    )
    A = sp.vstack([trace_row, mat[1:, :]], format="csc")
    b = np.zeros(n, dtype=complex)
    b[0] = weight

    try:
        lu = splu(A)
        x = lu.solve(b)
    except RuntimeError as exc:
        # Exactly singular replaced system: either a degenerate kernel or a
        # genuinely ill-posed generator. Distinguish where a dense SVD is cheap.
        if n <= 4096 and _kernel_dimension_dense(mat, scale) >= 2:
            raise MultiplicityError(
                f"steady state is not unique at dim={dim}", dim=dim
            ) from exc
        raise SolverError(f"sparse LU factorization failed: {exc}", dim=dim) from exc
    if not np.all(np.isfinite(x)):
        raise SolverError("steady-state solve produced non-finite entries", dim=dim)

    gap = _sigma_min(lu, n)
    if gap <= gap_rtol * max(1.0, scale):
        raise MultiplicityError(
            f"kernel gap {gap:.3e} below {gap_rtol:.1e} * ||L|| = "
            f"{gap_rtol * max(1.0, scale):.3e}; steady state not unique",
            dim=dim,
            gap=gap,
        )

    rho = unvectorize(x, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.real(np.trace(rho))
    residual = float(np.linalg.norm(mat @ vectorize(rho)))
    if residual > RESIDUAL_RTOL * max(1.0, scale):
        raise SolverError(
            f"steady-state residual {residual:.3e} exceeds tolerance "
            f"{RESIDUAL_RTOL * max(1.0, scale):.3e}",
            dim=dim,
            residual=residual,
        )
    diags = validate_density(rho)
    if not diags.ok:
        raise SolverError(
            "steady state violates density-matrix invariants: "
            f"hermiticity {diags.hermiticity_defect:.2e}, trace {diags.trace_defect:.2e}, "
            f"min eigenvalue {diags.min_eigenvalue:.2e}",
            dim=dim,
        )
    return SteadySolution(rho=rho, residual=residual, dim=dim, uniqueness_gap=gap)


def steady_state_auto(
    params: ModelParams, trunc: TruncationOptions | None = None
) -> SteadySolution:
    """Steady state at an adaptively chosen truncation.

    Starting from `default_truncation_start`, the truncation grows by the
    configured factor until the top two level populations sum below
    `tail_tol`; exceeding the cap raises TruncationError. A fixed `dim`
    bypasses the loop entirely.
    """
    trunc = trunc or TruncationOptions()
    if trunc.dim is not None:
        return steady_state(build_liouvillian(params, trunc.dim))

    dim = trunc.start if trunc.start is not None else default_truncation_start(params)
    dim = max(dim, 3)
    if dim > trunc.cap:
        raise TruncationError(
            f"starting truncation {dim} already exceeds cap {trunc.cap} "
            f"(limit-cycle occupation ~ {params.gamma1 / (2 * params.gamma2):.3g})",
            start=dim,
            cap=trunc.cap,
        )
    while True:
        sol = steady_state(build_liouvillian(params, dim))
        pops = sol.populations
        tail = float(pops[-1] + pops[-2])
        if tail < trunc.tail_tol:
            return sol
        nxt = math.ceil(trunc.growth * dim)
        if nxt > trunc.cap:
            if dim < trunc.cap:
                nxt = trunc.cap
            else:
                raise TruncationError(
                    f"tail population {tail:.3e} still above {trunc.tail_tol:.1e} "
                    f"at the truncation cap {trunc.cap}",
                    dim=dim,
                    tail=tail,
                    cap=trunc.cap,
                )
        dim = nxt


def choose_truncation(params: ModelParams, trunc: TruncationOptions | None = None) -> int:
    """Smallest accepted truncation for `params` under the adaptive tail rule."""
    return steady_state_auto(params, trunc).dim


@dataclass(frozen=True)
class EvolveResult:
    """Sampled trajectory of a fixed-step RK4 integration."""

    times: np.ndarray
    states: list
    final: np.ndarray
    max_trace_drift: float
    renormalizations: int


def evolve(
    rho0: np.ndarray,
    L: Liouvillian,
    t_final: float,
    dt: float,
    store_every: int | None = None,
    convergence_check: bool = False,
    renorm_tol: float = 1e-10,
) -> EvolveResult:
    """Fixed-step classical RK4 integration of vec(rho).

    Trace drift beyond `renorm_tol` is renormalized away and logged; it is
    never silently accepted, and hermiticity is deliberately not repaired
    (a hermiticity defect indicates a bug, not drift). With
    `convergence_check=True` the integration is repeated at dt/2 and the two
    endpoints must agree to 1e-6 elementwise.
    """
    if t_final <= 0 or dt <= 0:
        raise InvalidParamsError(f"t_final and dt must be positive, got {t_final}, {dt}")
    if L.params is not None:
        dt_max = 0.1 / L.params.rate_scale
        if dt > dt_max:
            raise StepSizeError(
                f"dt = {dt:.3e} exceeds 0.1 / (total rate) = {dt_max:.3e}",
                dt=dt,
                dt_max=dt_max,
            )
    diags = validate_density(rho0)
    if not diags.ok:
        raise InvalidParamsError(
            "initial state violates density-matrix invariants "
            f"(hermiticity {diags.hermiticity_defect:.2e}, trace {diags.trace_defect:.2e}, "
            f"min eigenvalue {diags.min_eigenvalue:.2e})"
        )

    nsteps = max(1, round(t_final / dt))
    if store_every is None:
        store_every = max(1, nsteps // 100)

    def integrate(step: float, substeps: int, record: bool):
        mat = L.matrix
        diag = trace_indices(L.dim)
        v = vectorize(rho0).astype(complex)
        times = [0.0]
        states = [rho0.copy()] if record else []
        max_drift = 0.0
        renorms = 0
        for k in range(1, substeps + 1):
            k1 = mat @ v
            k2 = mat @ (v + 0.5 * step * k1)
            k3 = mat @ (v + 0.5 * step * k2)
            k4 = mat @ (v + step * k3)
            v = v + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            tr = v[diag].sum().real
            if not np.isfinite(tr) or abs(tr - 1.0) > 0.5:
                raise InstabilityError(
                    f"trace diverged to {float(tr):.6g} at t = {k * step:.6g}; reduce dt",
                    t=k * step,
                    dt=step,
                )
            drift = abs(tr - 1.0)
            max_drift = max(max_drift, drift)
            if drift > renorm_tol:
                v = v / tr
                renorms += 1
            if record and (k % store_every == 0 or k == substeps):
                times.append(k * step)
                states.append(unvectorize(v.copy(), L.dim))
        if not np.all(np.isfinite(v)):
            raise InstabilityError("state became non-finite; reduce dt", dt=step)
        return np.array(times), states, unvectorize(v, L.dim), max_drift, renorms

    times, states, final, max_drift, renorms = integrate(dt, nsteps, record=True)
    if renorms:
        logger.warning(
            "trace drift above %.1e renormalized %d time(s), max drift %.3e",
            renorm_tol,
            renorms,
            max_drift,
        )
    if convergence_check:
        _, _, final_half, _, _ = integrate(0.5 * dt, 2 * nsteps, record=False)
        shift = float(np.max(np.abs(final - final_half)))
        if shift >= 1e-6:
            raise StepSizeError(
                f"halving dt moved the endpoint by {shift:.3e} (>= 1e-6); reduce dt",
                shift=shift,
                dt=dt,
            )
    return EvolveResult(
        times=times,
        states=states,
        final=final,
        max_trace_drift=max_drift,
        renormalizations=renorms,
    )


def kappa_slope(
    params: ModelParams,
    observable: Callable[[np.ndarray], float],
    h: float | None = None,
    rel_tol: float = 0.01,
    trunc: TruncationOptions | None = None,
) -> float:
    """One-sided derivative of observable(steady state) in kappa at kappa = 0.

    Uses the second-order forward stencil (-3 f(0) + 4 f(h) - f(2h)) / (2h)
    with h = 1e-4 * gamma1 by default; kappa < 0 is unphysical so no centered
    stencil exists. A repeat at h/2 (Richardson consistency check) must agree
    within `rel_tol`, up to a small absolute floor for near-zero slopes.

    The truncation is chosen once at kappa = 0 and reused for every stencil
    point, so truncation bias cancels in the differences.
    """
    if params.kappa != 0.0:
        raise InvalidParamsError(
            f"kappa_slope requires kappa = 0 in params, got {params.kappa}"
        )
    if h is None:
        h = 1e-4 * params.gamma1

    base = steady_state_auto(params, trunc)
    dim = base.dim

    def f(kap: float) -> float:
        if kap == 0.0:
            return float(observable(base.rho))
        sol = steady_state(build_liouvillian(params.replace(kappa=kap), dim))
        return float(observable(sol.rho))

    f0 = f(0.0)
    fh2 = f(0.5 * h)
    fh = f(h)
    f2h = f(2.0 * h)
    s1 = (-3.0 * f0 + 4.0 * fh - f2h) / (2.0 * h)
    s2 = (-3.0 * f0 + 4.0 * fh2 - fh) / h
    atol = 1e-6 * max(1.0, abs(f0)) / params.gamma1
    if abs(s1 - s2) > max(rel_tol * max(abs(s1), abs(s2)), atol):
        raise StepSizeError(
            f"finite-difference slopes at h and h/2 disagree: {s1:.6e} vs {s2:.6e}",
            slope_h=s1,
            slope_h2=s2,
            h=h,
        )
    return float(s1)
