"""FastAPI service wrapping the solver core.

Every endpoint is a stateless pure computation; requests are independent and
may be issued concurrently. Core numeric failures surface as HTTP 409 with a
machine-readable error code, while malformed requests are FastAPI's usual 422.
Run with `uvicorn qvdp.service.app:app` or through the CLI `qvdp serve`.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import ansatz_steady_state, classify_regime, mrl, sync_metrics
from ..boost import boost_verdict
from ..errors import QvdpError
from ..fock import fock_projector, validate_density
from ..model import build_liouvillian
from ..solvers import choose_truncation, evolve, steady_state_auto
from ..sweep import run_sweep
from . import schemas as s

__all__ = ["app", "create_app"]


def _regime_model(rho, params) -> s.RegimeModel:
    regime = classify_regime(rho, params)
    return s.RegimeModel(
        label=regime.label, p2=regime.p2, ratio=regime.ratio, occupation=regime.occupation
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="qvdp",
        version=__version__,
        description=(
            "Steady states, synchronization measures and noise-boost analysis "
            "of the driven quantum van der Pol oscillator."
        ),
    )

    @app.exception_handler(QvdpError)
    async def _qvdp_error(request: Request, exc: QvdpError) -> JSONResponse:
        body = s.ErrorBody(
            error_code=exc.code, message=str(exc), diagnostics=exc.diagnostics
        )
        return JSONResponse(status_code=409, content=body.model_dump())

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/steady", response_model=s.SteadyResponse)
    def steady(req: s.SteadyRequest) -> s.SteadyResponse:
        params = req.params.to_core()
        sol = steady_state_auto(params, req.trunc.to_core())
        metrics = sync_metrics(sol.rho)
        diags = validate_density(sol.rho)
        return s.SteadyResponse(
            dim=sol.dim,
            residual=sol.residual,
            uniqueness_gap=sol.uniqueness_gap,
            mrl=metrics.mrl,
            occupation=metrics.occupation,
            purity=metrics.purity,
            populations=[float(p) for p in metrics.populations],
            coherences=[float(c) for c in metrics.coherences],
            regime=_regime_model(sol.rho, params),
            diagnostics=s.DensityDiagnosticsModel(
                hermiticity_defect=diags.hermiticity_defect,
                trace_defect=diags.trace_defect,
                min_eigenvalue=diags.min_eigenvalue,
                ok=diags.ok,
            ),
            rho_real=np.real(sol.rho).tolist() if req.include_rho else None,
            rho_imag=np.imag(sol.rho).tolist() if req.include_rho else None,
        )

    @app.post("/evolve", response_model=s.EvolveResponse)
    def evolve_endpoint(req: s.EvolveRequest) -> s.EvolveResponse:
        params = req.params.to_core()
        dim = req.dim
        if dim is None:
            dim = choose_truncation(params, req.trunc.to_core())
        dim = max(dim, req.initial_fock + 2)
        L = build_liouvillian(params, dim)
        result = evolve(
            fock_projector(dim, req.initial_fock),
            L,
            t_final=req.t_final,
            dt=req.dt,
            store_every=req.store_every,
            convergence_check=req.convergence_check,
        )
        return s.EvolveResponse(
            dim=dim,
            times=[float(t) for t in result.times],
            mrl=[mrl(state) for state in result.states],
            occupation=[sync_metrics(state).occupation for state in result.states],
            trace_defect=[abs(float(np.trace(state).real) - 1.0) for state in result.states],
            populations_final=[float(p) for p in np.real(np.diag(result.final))],
            max_trace_drift=result.max_trace_drift,
            renormalizations=result.renormalizations,
        )

    @app.post("/boost", response_model=s.BoostResponse)
    def boost(req: s.BoostRequest) -> s.BoostResponse:
        report = boost_verdict(
            req.params.to_core(), numeric=req.numeric, trunc=req.trunc.to_core()
        )
        return s.BoostResponse(
            numerator=report.numerator,
            denominator=report.denominator,
            numerator_slope=report.numerator_slope,
            denominator_slope=report.denominator_slope,
            s_analytic=report.s_analytic,
            analytic_slope=report.analytic_slope,
            verdict=report.verdict,
            deep_quantum_coefficient=report.deep_quantum_coefficient,
            numeric_slope=report.numeric_slope,
            slope_sign_agrees=report.slope_sign_agrees,
        )

    @app.post("/ansatz", response_model=s.AnsatzResponse)
    def ansatz(req: s.AnsatzRequest) -> s.AnsatzResponse:
        params = req.params.to_core()
        rho3, metrics = ansatz_steady_state(params)
        out = s.AnsatzResponse(
            populations=[float(p) for p in metrics.populations],
            rho01_re=float(np.real(rho3[0, 1])),
            rho01_im=float(np.imag(rho3[0, 1])),
            mrl_ansatz=metrics.mrl,
        )
        if req.compare:
            full = steady_state_auto(params, req.trunc.to_core())
            full_mrl = mrl(full.rho)
            rho01 = abs(full.rho[0, 1])
            out.mrl_full = full_mrl
            out.rel_err = abs(metrics.mrl - full_mrl) / full_mrl if full_mrl > 0 else None
            out.rho12_over_rho01 = abs(full.rho[1, 2]) / rho01 if rho01 > 0 else None
            out.full_dim = full.dim
        return out

    @app.post("/regimes", response_model=s.RegimeModel)
    def regimes(req: s.RegimesRequest) -> s.RegimeModel:
        params = req.params.to_core()
        sol = steady_state_auto(params, req.trunc.to_core())
        return _regime_model(sol.rho, params)

    @app.post("/sweep", response_model=s.SweepResponse)
    def sweep(req: s.SweepRequest) -> s.SweepResponse:
        table = run_sweep(req.spec.to_core())
        return s.SweepResponse(columns=table.columns, rows=table.rows, n_failed=table.n_failed)

    return app


app = create_app()
