"""Synchronization measures, regime classification and the three-level reduced model.

The synchronization measure throughout is the mean resultant length (MRL)

    S = |sum_n rho_{n,n+1}|,

the modulus of the summed first superdiagonal, i.e. |<exp(i phi)>| for the
canonical phase distribution. A harmonic drive creates a phase preference on
the n <-> n+1 coherences; a squeezing drive creates it on n <-> n+2, so the
squeezed branch is quantified by |rho_02| alongside the (parity-suppressed)
superdiagonal MRL.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AnsatzError, InvalidParamsError
from .model import ModelParams
from .solvers import SteadySolution, TruncationOptions, steady_state_auto

__all__ = [
    "SyncMetrics",
    "RegimeLabel",
    "mrl",
    "sync_metrics",
    "classify_regime",
    "ansatz_steady_state",
    "SqueezeDriveComparison",
    "squeeze_vs_drive",
]


def mrl(rho: np.ndarray) -> float:
    """Mean resultant length |sum_n rho_{n,n+1}| of a state."""
    return float(abs(np.sum(np.diagonal(rho, offset=1))))


@dataclass(frozen=True)
class SyncMetrics:
    """Phase-coherence and occupation summary of a state."""

    mrl: float
    coherences: np.ndarray  # |rho_{n,n+1}| along the first superdiagonal
    populations: np.ndarray
    occupation: float  # <a^dag a>, proxy for the limit-cycle size
    purity: float


def sync_metrics(rho: np.ndarray) -> SyncMetrics:
    pops = np.real(np.diag(rho))
    n = np.arange(rho.shape[0])
    return SyncMetrics(
        mrl=mrl(rho),
        coherences=np.abs(np.diagonal(rho, offset=1)),
        populations=pops,
        occupation=float(np.sum(n * pops)),
        purity=float(np.real(np.trace(rho @ rho))),
    )


@dataclass(frozen=True)
class RegimeLabel:
    """Coarse parameter-regime classification of a steady state."""

    label: str  # one of: classical, semiclassical, quantum, deep-quantum
    p2: float
    ratio: float  # gamma2 / gamma1
    occupation: float


def classify_regime(
    rho: np.ndarray,
    params: ModelParams,
    p2_threshold: float = 1e-2,
    classical_occupation: float = 10.0,
) -> RegimeLabel:
    """Label the regime of a steady state.

    Large occupation wins (classical), then a negligible |2> population marks
    the deep quantum regime; the remaining cases split on gamma2/gamma1. The
    occupation check precedes the p2 check because a large-amplitude state
    also has negligible p2 without being remotely deep-quantum.
    """
    pops = np.real(np.diag(rho))
    p2 = float(pops[2]) if len(pops) > 2 else 0.0
    occupation = float(np.sum(np.arange(len(pops)) * pops))
    ratio = params.gamma2 / params.gamma1
    if occupation > classical_occupation:
        label = "classical"
    elif p2 < p2_threshold:
        label = "deep-quantum"
    elif ratio >= 1.0:
        label = "quantum"
    else:
        label = "semiclassical"
    return RegimeLabel(label=label, p2=p2, ratio=ratio, occupation=occupation)


def _reduced_system(params: ModelParams):
    """Coefficient matrix of the three-level reduced model.

    Projecting the master equation onto levels {0, 1, 2} and dropping the
    rho_02 and rho_12 coherences (while keeping the population rho_22 fed by
    two-photon loss) closes a real-linear system for
    x = (p0, p1, p2, Re rho_01, Im rho_01):

        p0' = -g1 p0 + k p1 + 2 g2 p2 - 2 W v
        p1' =  g1 p0 - (2 g1 + k) p1 + 2 k p2 + 2 W v
        p2' =  2 g1 p1 - 2 (g2 + k) p2
        u'  = -g u - d v
        v'  =  d u - g v + W (p0 - p1)

    with g = (3 g1 + k) / 2 and (d, W, g1, g2, k) = (delta, Omega, gamma1,
    gamma2, kappa). Squeezing only drives the dropped coherences, so eta does
    not appear.
    """
    g1, g2, k = params.gamma1, params.gamma2, params.kappa
    d, W = params.delta, params.omega
    g = 0.5 * (3.0 * g1 + k)
    return np.array(
        [
            [-g1, k, 2.0 * g2, 0.0, -2.0 * W],
            [g1, -(2.0 * g1 + k), 2.0 * k, 0.0, 2.0 * W],
            [0.0, 2.0 * g1, -2.0 * (g2 + k), 0.0, 0.0],
            [0.0, 0.0, 0.0, -g, -d],
            [W, -W, 0.0, d, -g],
        ]
    )


def ansatz_steady_state(params: ModelParams):
    """Steady state of the three-level reduced model.

    Returns (rho, metrics) where rho is the reduced 3x3 state with the
    dropped coherences structurally zero and metrics.mrl = |rho_01|. The
    population equations are linearly dependent, so the first is replaced by
    the normalization p0 + p1 + p2 = 1.

    Outside the quantum/deep-quantum regime (gamma2 < gamma1), or with a
    squeezing drive (which the reduced model cannot represent), a warning is
    emitted rather than an error.
    """
    if params.gamma2 < params.gamma1:
        warnings.warn(
            "three-level reduction assumes gamma2 >= gamma1; results are "
            "unreliable in the (semi)classical regime",
            stacklevel=2,
        )
    if params.eta != 0.0:
        warnings.warn(
            "squeezing drives only the dropped 0<->2 and 1<->2 coherences; "
            "eta has no effect on the reduced model",
            stacklevel=2,
        )
    A = _reduced_system(params)
    A[0, :] = [1.0, 1.0, 1.0, 0.0, 0.0]
    b = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    if not np.isfinite(cond := np.linalg.cond(A)) or cond > 1e12:
        raise AnsatzError(f"reduced three-level system is singular (cond = {cond:.3e})")
    x = np.linalg.solve(A, b)
    p0, p1, p2, u, v = x
    c = u + 1j * v
    rho = np.array(
        [[p0, c, 0.0], [np.conj(c), p1, 0.0], [0.0, 0.0, p2]], dtype=complex
    )
    return rho, sync_metrics(rho)


@dataclass(frozen=True)
class SqueezeDriveComparison:
    """Steady-state synchronization signals of matched-strength drive vs squeezing.

    The drive branch (Omega = s, eta = 0) is scored by its MRL. The squeezed
    branch (Omega = 0, eta = s) has MRL ~ 0 by number-parity symmetry; its
    phase preference lives on the 0 <-> 2 coherence, so `s_squeeze` sums the
    superdiagonal MRL and |rho_02|, both of which are also reported
    separately.
    """

    s_drive: float
    s_squeeze: float
    squeeze_mrl: float
    squeeze_rho02: float
    drive_dim: int
    squeeze_dim: int


def squeeze_vs_drive(
    ratio: float,
    strength: float,
    delta: float = 0.0,
    gamma1: float = 1.0,
    kappa: float = 0.0,
    trunc: TruncationOptions | None = None,
) -> SqueezeDriveComparison:
    """Compare harmonic driving against squeezing at equal strength.

    `ratio` is gamma2/gamma1 and `strength` the common drive amplitude s; the
    two branches are solved with (Omega = s, eta = 0) and (Omega = 0, eta = s)
    at otherwise identical parameters.
    """
    if strength < 0:
        raise InvalidParamsError(f"strength must be >= 0, got {strength}")
    common = dict(gamma1=gamma1, gamma2=ratio * gamma1, delta=delta, kappa=kappa)
    drive: SteadySolution = steady_state_auto(
        ModelParams(omega=strength, eta=0.0, **common), trunc
    )
    squeeze: SteadySolution = steady_state_auto(
        ModelParams(omega=0.0, eta=strength, **common), trunc
    )
    squeeze_mrl = mrl(squeeze.rho)
    squeeze_rho02 = float(abs(squeeze.rho[0, 2]))
    return SqueezeDriveComparison(
        s_drive=mrl(drive.rho),
        s_squeeze=squeeze_mrl + squeeze_rho02,
        squeeze_mrl=squeeze_mrl,
        squeeze_rho02=squeeze_rho02,
        drive_dim=drive.dim,
        squeeze_dim=squeeze.dim,
    )
