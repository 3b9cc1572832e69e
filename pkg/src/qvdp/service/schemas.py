"""Pydantic request/response models for the HTTP service.

These mirror the core dataclasses one-to-one; validation that would raise
InvalidParamsError or ConfigError in the core is caught here at the HTTP
boundary instead (422 responses). Successful payloads never carry NaN: failed
sweep cells travel as JSON null and are rendered as "nan" only at CSV time.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..model import ModelParams
from ..solvers import TruncationOptions
from ..sweep import Axis, SweepSpec


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamsModel(_Strict):
    """Model parameters; defaults are the undriven deep-quantum point."""

    gamma1: float = Field(1.0, gt=0, description="single-photon pump rate")
    gamma2: float = Field(1e4, gt=0, description="two-photon loss rate")
    delta: float = Field(0.0, description="drive detuning")
    omega: float = Field(0.0, ge=0, description="harmonic drive strength")
    eta: float = Field(0.0, ge=0, description="squeezing strength")
    kappa: float = Field(0.0, ge=0, description="single-photon loss rate")

    def to_core(self) -> ModelParams:
        return ModelParams(**self.model_dump())


class TruncationModel(_Strict):
    tail_tol: float = Field(1e-9, gt=0)
    cap: int = Field(160, ge=3)
    start: Optional[int] = Field(None, ge=3)
    growth: float = Field(1.5, gt=1.0)
    dim: Optional[int] = Field(None, ge=3, description="fixed truncation, skips the adaptive rule")

    def to_core(self) -> TruncationOptions:
        return TruncationOptions(**self.model_dump())


class DensityDiagnosticsModel(_Strict):
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    ok: bool


class RegimeModel(_Strict):
    label: str
    p2: float
    ratio: float
    occupation: float


class SteadyRequest(_Strict):
    params: ParamsModel = ParamsModel()
    trunc: TruncationModel = TruncationModel()
    include_rho: bool = False


class SteadyResponse(_Strict):
    dim: int
    residual: float
    uniqueness_gap: float
    mrl: float
    occupation: float
    purity: float
    populations: list[float]
    coherences: list[float]
    regime: RegimeModel
    diagnostics: DensityDiagnosticsModel
    rho_real: Optional[list[list[float]]] = None
    rho_imag: Optional[list[list[float]]] = None


class EvolveRequest(_Strict):
    params: ParamsModel = ParamsModel()
    t_final: float = Field(..., gt=0)
    dt: float = Field(..., gt=0)
    dim: Optional[int] = Field(None, ge=3)
    initial_fock: int = Field(0, ge=0)
    store_every: Optional[int] = Field(None, ge=1)
    convergence_check: bool = False
    trunc: TruncationModel = TruncationModel()


class EvolveResponse(_Strict):
    dim: int
    times: list[float]
    mrl: list[float]
    occupation: list[float]
    trace_defect: list[float]
    populations_final: list[float]
    max_trace_drift: float
    renormalizations: int


class BoostRequest(_Strict):
    params: ParamsModel = ParamsModel()
    numeric: bool = True
    trunc: TruncationModel = TruncationModel()


class BoostResponse(_Strict):
    numerator: float
    denominator: float
    numerator_slope: float
    denominator_slope: float
    s_analytic: float
    analytic_slope: float
    verdict: bool
    deep_quantum_coefficient: float
    numeric_slope: Optional[float] = None
    slope_sign_agrees: Optional[bool] = None


class AnsatzRequest(_Strict):
    params: ParamsModel = ParamsModel()
    compare: bool = True
    trunc: TruncationModel = TruncationModel()


class AnsatzResponse(_Strict):
    populations: list[float]
    rho01_re: float
    rho01_im: float
    mrl_ansatz: float
    mrl_full: Optional[float] = None
    rel_err: Optional[float] = None
    rho12_over_rho01: Optional[float] = None
    full_dim: Optional[int] = None


class RegimesRequest(_Strict):
    params: ParamsModel = ParamsModel()
    trunc: TruncationModel = TruncationModel()


class AxisModel(_Strict):
    name: Literal["gamma1", "gamma2", "delta", "omega", "eta", "kappa"]
    min: float
    max: float
    count: int = Field(..., ge=2)
    spacing: Literal["linear", "log"] = "linear"

    def to_core(self) -> Axis:
        return Axis(**self.model_dump())


class SweepSpecModel(_Strict):
    axes: list[AxisModel] = Field(..., min_length=1)
    fixed: dict[str, float] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=lambda: ["mrl"])
    drive_mode: Literal["fixed", "scheduled"] = "fixed"
    drive_schedule: Optional[list[tuple[float, float]]] = None
    n_populations: int = Field(6, ge=1)
    workers: int = Field(1, ge=1)
    trunc: TruncationModel = TruncationModel()

    def to_core(self) -> SweepSpec:
        return SweepSpec(
            axes=[ax.to_core() for ax in self.axes],
            fixed=dict(self.fixed),
            outputs=tuple(self.outputs),
            drive_mode=self.drive_mode,
            drive_schedule=(
                [(float(a), float(b)) for a, b in self.drive_schedule]
                if self.drive_schedule is not None
                else None
            ),
            n_populations=self.n_populations,
            workers=self.workers,
            trunc=self.trunc.to_core(),
        )


class SweepRequest(_Strict):
    spec: SweepSpecModel


class SweepResponse(_Strict):
    columns: list[str]
    rows: list[dict[str, Any]]
    n_failed: int


class ErrorBody(_Strict):
    error_code: str
    message: str
    diagnostics: dict[str, Any] = Field(default_factory=dict)
