"""HTTP surface: endpoints, validation, error mapping."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from qvdp.service.app import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


class TestSteady:
    def test_deep_quantum_defaults(self, client):
        resp = client.post("/steady", json={})
        assert resp.status_code == 200
        data = resp.json()
        assert data["dim"] == 11
        assert abs(data["populations"][0] - 2.0 / 3.0) < 1e-3
        assert abs(data["populations"][1] - 1.0 / 3.0) < 1e-3
        assert data["regime"]["label"] == "deep-quantum"
        assert data["diagnostics"]["ok"] is True
        assert data["rho_real"] is None

    def test_include_rho(self, client):
        resp = client.post(
            "/steady",
            json={"params": {"gamma2": 100.0, "omega": 1.0}, "include_rho": True},
        )
        data = resp.json()
        rho = np.array(data["rho_real"]) + 1j * np.array(data["rho_imag"])
        assert rho.shape == (data["dim"], data["dim"])
        assert abs(np.trace(rho) - 1.0) < 1e-10
        total = np.sum(np.diagonal(rho, offset=1))
        assert abs(total) == pytest.approx(data["mrl"], rel=1e-12)

    def test_invalid_params_rejected(self, client):
        resp = client.post("/steady", json={"params": {"gamma1": 0.0}})
        assert resp.status_code == 422

    def test_unknown_fields_rejected(self, client):
        resp = client.post("/steady", json={"params": {"gamma3": 1.0}})
        assert resp.status_code == 422

    def test_truncation_failure_maps_to_409(self, client):
        resp = client.post("/steady", json={"params": {"gamma1": 1e4, "gamma2": 1.0}})
        assert resp.status_code == 409
        body = resp.json()
        assert body["error_code"] == "truncation-failure"
        assert body["diagnostics"]["cap"] == 160


class TestBoost:
    def test_deep_quantum_verdict(self, client):
        resp = client.post("/boost", json={"params": {"gamma2": 100.0, "omega": 1.0}})
        assert resp.status_code == 200
        data = resp.json()
        assert data["verdict"] is True
        assert data["numerator"] == 600.0
        assert data["denominator"] == 5121.0
        assert data["numeric_slope"] > 0.0
        assert data["slope_sign_agrees"] is True

    def test_kappa_nonzero_is_numeric_error(self, client):
        resp = client.post(
            "/boost", json={"params": {"gamma2": 100.0, "omega": 1.0, "kappa": 0.5}}
        )
        assert resp.status_code == 409
        assert resp.json()["error_code"] == "invalid-params"

    def test_skip_numeric_slope(self, client):
        resp = client.post(
            "/boost", json={"params": {"gamma2": 100.0, "omega": 1.0}, "numeric": False}
        )
        data = resp.json()
        assert data["numeric_slope"] is None
        assert data["slope_sign_agrees"] is None


class TestAnsatz:
    def test_comparison_fields(self, client):
        resp = client.post("/ansatz", json={"params": {"gamma2": 100.0, "omega": 1.0}})
        assert resp.status_code == 200
        data = resp.json()
        assert data["mrl_ansatz"] == pytest.approx(600.0 / 5121.0, rel=1e-12)
        assert data["mrl_full"] == pytest.approx(0.133418, rel=1e-4)
        assert data["rho12_over_rho01"] < 0.5
        assert len(data["populations"]) == 3

    def test_without_comparison(self, client):
        resp = client.post(
            "/ansatz", json={"params": {"gamma2": 100.0, "omega": 1.0}, "compare": False}
        )
        data = resp.json()
        assert data["mrl_full"] is None and data["full_dim"] is None


class TestEvolve:
    def test_short_relaxation(self, client):
        resp = client.post(
            "/evolve",
            json={
                "params": {"gamma2": 100.0, "omega": 1.0},
                "dim": 8,
                "t_final": 2.0,
                "dt": 5e-4,
                "store_every": 400,
            },
        )
        assert resp.status_code == 200
        data = resp.json()
        assert data["dim"] == 8
        assert data["times"][0] == 0.0 and data["times"][-1] == pytest.approx(2.0)
        assert all(d < 1e-8 for d in data["trace_defect"])
        assert abs(sum(data["populations_final"]) - 1.0) < 1e-8

    def test_step_size_violation_maps_to_409(self, client):
        resp = client.post(
            "/evolve",
            json={"params": {"gamma2": 100.0, "omega": 1.0}, "dim": 8, "t_final": 1.0, "dt": 0.1},
        )
        assert resp.status_code == 409
        assert resp.json()["error_code"] == "step-size"

    def test_missing_required_fields(self, client):
        resp = client.post("/evolve", json={"params": {}})
        assert resp.status_code == 422


class TestRegimes:
    def test_labels(self, client):
        resp = client.post("/regimes", json={"params": {"gamma1": 40.0, "gamma2": 1.0}})
        assert resp.json()["label"] == "classical"
        resp = client.post("/regimes", json={"params": {"gamma2": 1e4}})
        assert resp.json()["label"] == "deep-quantum"


class TestSweep:
    def test_basic_sweep_roundtrip(self, client):
        spec = {
            "axes": [{"name": "kappa", "min": 0.0, "max": 1.0, "count": 3}],
            "fixed": {"gamma2": 100.0},
            "outputs": ["mrl", "occupation"],
        }
        resp = client.post("/sweep", json={"spec": spec})
        assert resp.status_code == 200
        data = resp.json()
        assert data["n_failed"] == 0
        assert len(data["rows"]) == 3
        assert data["columns"][0] == "kappa"
        # JSON transport keeps float64 values exact (shortest-roundtrip repr)
        mrls = [r["mrl"] for r in data["rows"]]
        assert mrls[1] > mrls[0]

    def test_invalid_spec_is_usage_error(self, client):
        spec = {"axes": [{"name": "kappa", "min": 0.0, "max": 1.0, "count": 1}]}
        resp = client.post("/sweep", json={"spec": spec})
        assert resp.status_code == 422  # count >= 2 enforced by the schema

    def test_semantic_config_error_maps_to_409(self, client):
        spec = {
            "axes": [{"name": "kappa", "min": 0.0, "max": 1.0, "count": 3, "spacing": "log"}],
            "fixed": {"gamma2": 100.0},
        }
        resp = client.post("/sweep", json={"spec": spec})
        assert resp.status_code == 409
        assert resp.json()["error_code"] == "config-error"
