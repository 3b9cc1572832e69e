"""Closed-form criterion for noise-boosted synchronization.

The three-level reduced model yields an analytic synchronization level
S = M / D, a ratio of a numerator M and denominator D built from the
physical rates (M also carries a square root in delta and kappa):

    M = 2 Omega [gamma1 (gamma2 - kappa) + kappa (gamma2 + kappa)]
        * sqrt(4 delta^2 + (kappa + 3 gamma1)^2)

    D = gamma1 [4 gamma1 (delta^2 + 4 kappa^2 + 3 Omega^2) + 15 gamma1^2 kappa
        + 9 gamma1^3 + 4 delta^2 kappa + 7 kappa (kappa^2 + 4 Omega^2)]
        + kappa^2 (4 delta^2 + kappa^2 + 8 Omega^2)
        + gamma2 (3 gamma1 + kappa) (6 gamma1 kappa + 9 gamma1^2 + 4 delta^2
        + kappa^2 + 8 Omega^2)

Adding a little single-photon loss helps synchronization exactly when
M'/M > D'/D at kappa = 0 (primes are kappa-derivatives), equivalently
M' D - M D' > 0, equivalently dS/dkappa > 0. The derivatives are
hand-differentiated closed forms, self-checked against finite differences on
every call because transcription slips are the dominant risk with formulas
this long.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import mrl
from .errors import InvalidParamsError, SolverError
from .model import ModelParams
from .solvers import TruncationOptions, kappa_slope

__all__ = [
    "sync_numerator",
    "sync_denominator",
    "kappa_derivatives",
    "deep_quantum_boost_coefficient",
    "BoostReport",
    "boost_verdict",
]

DERIVATIVE_CHECK_RTOL = 1e-5


def sync_numerator(params: ModelParams) -> float:
    """Numerator M of the analytic synchronization level."""
    g1, g2, k = params.gamma1, params.gamma2, params.kappa
    d, W = params.delta, params.omega
    return (
        2.0
        * W
        * (g1 * (g2 - k) + k * (g2 + k))
        * math.sqrt(4.0 * d * d + (k + 3.0 * g1) ** 2)
    )


def sync_denominator(params: ModelParams) -> float:
    """Denominator D of the analytic synchronization level (positive for valid rates)."""
    g1, g2, k = params.gamma1, params.gamma2, params.kappa
    d, W = params.delta, params.omega
    return (
        g1
        * (
            4.0 * g1 * (d * d + 4.0 * k * k + 3.0 * W * W)
            + 15.0 * g1 * g1 * k
            + 9.0 * g1**3
            + 4.0 * d * d * k
            + 7.0 * k * (k * k + 4.0 * W * W)
        )
        + k * k * (4.0 * d * d + k * k + 8.0 * W * W)
        + g2 * (3.0 * g1 + k) * (6.0 * g1 * k + 9.0 * g1 * g1 + 4.0 * d * d + k * k + 8.0 * W * W)
    )


def _derivatives_closed_form(params: ModelParams) -> tuple[float, float]:
    """Hand-differentiated dM/dkappa and dD/dkappa at kappa = 0."""
    g1, g2 = params.gamma1, params.gamma2
    d, W = params.delta, params.omega
    root = math.sqrt(4.0 * d * d + 9.0 * g1 * g1)
    # M = 2 W P(k) R(k): P(0) = g1 g2, P'(0) = g2 - g1,
    # R(0) = root, R'(0) = 3 g1 / root.
    m_prime = 2.0 * W * ((g2 - g1) * root + 3.0 * g1 * g1 * g2 / root)
    d_prime = g1 * (15.0 * g1 * g1 + 4.0 * d * d + 28.0 * W * W) + g2 * (
        27.0 * g1 * g1 + 4.0 * d * d + 8.0 * W * W
    )
    return m_prime, d_prime


def _derivatives_finite_difference(params: ModelParams) -> tuple[float, float]:
    """Second-order one-sided stencil in kappa at kappa = 0, step 1e-6 * gamma1.

    One-sided because kappa < 0 is unphysical; the formulas are only ever
    evaluated at small positive kappa.
    """
    h = 1e-6 * params.gamma1

    def stencil(f):
        return (
            -3.0 * f(params)
            + 4.0 * f(params.replace(kappa=h))
            - f(params.replace(kappa=2.0 * h))
        ) / (2.0 * h)

    return stencil(sync_numerator), stencil(sync_denominator)


def kappa_derivatives(params: ModelParams) -> tuple[float, float]:
    """(dM/dkappa, dD/dkappa) at kappa = 0, with a mandatory finite-difference check."""
    if params.kappa != 0.0:
        raise InvalidParamsError(
            f"kappa derivatives are defined at kappa = 0, got {params.kappa}"
        )
    m_prime, d_prime = _derivatives_closed_form(params)
    m_fd, d_fd = _derivatives_finite_difference(params)
    scale = max(params.gamma1, params.gamma2, params.omega, abs(params.delta)) ** 3
    for name, closed, fd in (("M'", m_prime, m_fd), ("D'", d_prime, d_fd)):
        if abs(closed - fd) > DERIVATIVE_CHECK_RTOL * max(abs(closed), abs(fd), 1e-9 * scale):
            raise SolverError(
                f"closed-form {name} = {closed:.9e} disagrees with finite "
                f"difference {fd:.9e}",
                closed=closed,
                finite_difference=fd,
            )
    return m_prime, d_prime


def deep_quantum_boost_coefficient(params: ModelParams) -> float:
    """Leading gamma2^2 coefficient of M' D - M D' as gamma2 -> infinity.

    Keeping only the highest joint power of gamma2 gives

        2 Omega gamma1 [ R (8 delta^2 + 16 Omega^2)
                         + 9 gamma1^2 (9 gamma1^2 + 4 delta^2 + 8 Omega^2) / R ]

    with R = sqrt(4 delta^2 + 9 gamma1^2). Every term is nonnegative and the
    second is strictly positive, so in the deep quantum limit the boost
    condition holds for every Omega > 0.
    """
    g1, d, W = params.gamma1, params.delta, params.omega
    root = math.sqrt(4.0 * d * d + 9.0 * g1 * g1)
    return (
        2.0
        * W
        * g1
        * (
            root * (8.0 * d * d + 16.0 * W * W)
            + 9.0 * g1 * g1 * (9.0 * g1 * g1 + 4.0 * d * d + 8.0 * W * W) / root
        )
    )


@dataclass(frozen=True)
class BoostReport:
    """Closed-form boost verdict plus the full-numerics cross-check."""

    numerator: float  # M
    denominator: float  # D
    numerator_slope: float  # M' at kappa = 0
    denominator_slope: float  # D' at kappa = 0
    s_analytic: float  # M / D
    analytic_slope: float  # d(M/D)/dkappa at kappa = 0
    verdict: bool  # M' D - M D' > 0
    deep_quantum_coefficient: float
    numeric_slope: float | None = None  # finite-difference slope of the full-numerics MRL
    slope_sign_agrees: bool | None = None


def boost_verdict(
    params: ModelParams,
    numeric: bool = True,
    trunc: TruncationOptions | None = None,
) -> BoostReport:
    """Evaluate the noise-boost condition M' D - M D' > 0 at kappa = 0.

    With `numeric=True` the full-numerics MRL slope in kappa is also computed
    and its sign compared against the verdict; the analytic result rests on
    the reduced model, so agreement is expected but not structural.
    """
    if params.kappa != 0.0:
        raise InvalidParamsError(f"boost verdict requires kappa = 0, got {params.kappa}")
    if params.omega <= 0.0:
        raise InvalidParamsError(
            f"boost verdict requires a harmonic drive Omega > 0, got {params.omega}"
        )
    m = sync_numerator(params)
    d = sync_denominator(params)
    m_prime, d_prime = kappa_derivatives(params)
    discriminant = m_prime * d - m * d_prime
    verdict = discriminant > 0.0
    numeric_slope = None
    agrees = None
    if numeric:
        numeric_slope = kappa_slope(params, mrl, trunc=trunc)
        agrees = (numeric_slope > 0.0) == verdict
    return BoostReport(
        numerator=m,
        denominator=d,
        numerator_slope=m_prime,
        denominator_slope=d_prime,
        s_analytic=m / d,
        analytic_slope=discriminant / (d * d),
        verdict=verdict,
        deep_quantum_coefficient=deep_quantum_boost_coefficient(params),
        numeric_slope=numeric_slope,
        slope_sign_agrees=agrees,
    )
