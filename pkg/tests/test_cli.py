"""Thin-client CLI: exit codes, config handling, output files."""

import json

import pytest

from qvdp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestUsageErrors:
    def test_no_subcommand(self, capsys):
        code, _, err = run(capsys, )
        assert code == 1
        assert "steady" in err

    def test_unknown_subcommand(self, capsys):
        code, _, err = run(capsys, "wigner")
        assert code == 1

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "steady", "--frobnicate")
        assert code == 1

    def test_missing_config_file(self, capsys):
        code, _, err = run(capsys, "steady", "--config", "/no/such/file.json")
        assert code == 1
        assert "not found" in err

    def test_malformed_config(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        code, _, err = run(capsys, "steady", "--config", str(bad))
        assert code == 1

    def test_malformed_override(self, capsys):
        code, _, err = run(capsys, "steady", "--set", "gamma2")
        assert code == 1

    def test_unknown_top_level_key(self, capsys):
        code, _, err = run(capsys, "steady", "--set", "gama2=100")
        assert code == 1
        assert "unknown config key" in err

    def test_unknown_block_key_rejected_by_service(self, capsys):
        code, _, err = run(capsys, "steady", "--set", "trunc.bogus=1")
        assert code == 1


class TestSteady:
    def test_defaults_print_deep_quantum_populations(self, capsys):
        code, out, _ = run(capsys, "steady")
        assert code == 0
        assert "p0=0.6666" in out
        assert "p1=0.3334" in out or "p1=0.3333" in out
        assert "deep-quantum" in out

    def test_overrides_and_json_output(self, capsys, tmp_path):
        out_file = tmp_path / "steady.json"
        code, out, _ = run(
            capsys,
            "steady",
            "--set",
            "gamma2=100",
            "--set",
            "omega=1",
            "--out",
            str(out_file),
        )
        assert code == 0
        data = json.loads(out_file.read_text(encoding="utf-8"))
        assert data["dim"] == 11
        assert data["mrl"] == pytest.approx(0.133418, rel=1e-4)

    def test_numeric_failure_exit_code(self, capsys):
        code, _, err = run(capsys, "steady", "--set", "gamma1=10000", "--set", "gamma2=1")
        assert code == 2
        assert "truncation-failure" in err

    def test_config_file_roundtrip(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"gamma1": 40.0, "gamma2": 1.0}), encoding="utf-8")
        code, out, _ = run(capsys, "steady", "--config", str(cfg))
        assert code == 0
        assert "classical" in out


class TestBoost:
    def test_prints_verdict_and_both_slopes(self, capsys):
        code, out, _ = run(capsys, "boost", "--set", "gamma2=100", "--set", "omega=1")
        assert code == 0
        assert "verdict: boost" in out
        assert "analytic_slope=" in out
        assert "numeric_slope=" in out
        assert "sign_agrees=true" in out

    def test_no_numeric_flag(self, capsys):
        code, out, _ = run(
            capsys, "boost", "--no-numeric", "--set", "gamma2=100", "--set", "omega=1"
        )
        assert code == 0
        assert "numeric_slope=" not in out

    def test_kappa_nonzero_is_numeric_failure(self, capsys):
        code, _, err = run(
            capsys, "boost", "--set", "gamma2=100", "--set", "omega=1", "--set", "kappa=0.5"
        )
        assert code == 2


class TestSweepCommand:
    def test_requires_sweep_block(self, capsys):
        code, _, err = run(capsys, "sweep")
        assert code == 1
        assert "sweep" in err

    def test_writes_deterministic_csv(self, capsys, tmp_path):
        argv = [
            "sweep",
            "--set",
            'sweep.axes=[{"name":"kappa","min":0,"max":2,"count":5}]',
            "--set",
            'sweep.fixed={"gamma2":100}',
        ]
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        code, out, _ = run(capsys, *argv, "--out", str(first))
        assert code == 0
        assert "5 grid points, 0 failed" in out
        code, _, _ = run(capsys, *argv, "--set", "sweep.workers=3", "--out", str(second))
        assert code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_plot_script_flag(self, capsys, tmp_path):
        out_file = tmp_path / "sweep.csv"
        code, out, _ = run(
            capsys,
            "sweep",
            "--set",
            'sweep.axes=[{"name":"kappa","min":0,"max":2,"count":3}]',
            "--set",
            'sweep.fixed={"gamma2":100}',
            "--out",
            str(out_file),
            "--emit-plot-script",
        )
        assert code == 0
        assert (tmp_path / "sweep.plot.py").exists()

    def test_out_dir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("QVDP_OUT_DIR", str(tmp_path))
        code, _, _ = run(
            capsys,
            "sweep",
            "--set",
            'sweep.axes=[{"name":"kappa","min":0,"max":2,"count":3}]',
            "--set",
            'sweep.fixed={"gamma2":100}',
            "--out",
            "nested/out.csv",
        )
        assert code == 0
        assert (tmp_path / "nested" / "out.csv").exists()


class TestEvolveCommand:
    def test_requires_time_parameters(self, capsys):
        code, _, err = run(capsys, "evolve")
        assert code == 1
        assert "t_final" in err

    def test_writes_time_series(self, capsys, tmp_path):
        out_file = tmp_path / "traj.csv"
        code, out, _ = run(
            capsys,
            "evolve",
            "--set",
            "gamma2=100",
            "--set",
            "omega=1",
            "--set",
            "evolve.t_final=1.0",
            "--set",
            "evolve.dt=0.0005",
            "--set",
            "evolve.dim=8",
            "--set",
            "evolve.store_every=200",
            "--out",
            str(out_file),
        )
        assert code == 0
        lines = out_file.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,mrl,occupation,trace_defect"
        assert len(lines) > 5


class TestRemoteServer:
    def test_unreachable_server_is_numeric_failure(self, capsys):
        code, _, err = run(capsys, "steady", "--server", "http://127.0.0.1:1")
        assert code == 2
        assert "unreachable" in err


class TestOtherCommands:
    def test_ansatz_summary(self, capsys):
        code, out, _ = run(capsys, "ansatz", "--set", "gamma2=100", "--set", "omega=1")
        assert code == 0
        assert "reduced model" in out
        assert "rel_err=" in out

    def test_regimes_summary(self, capsys):
        code, out, _ = run(capsys, "regimes", "--set", "gamma2=10000")
        assert code == 0
        assert "regime=deep-quantum" in out
