"""Command line behavior: artifacts, determinism, exit codes.

Most cases drive cli.main() in process; one subprocess case proves the
installed console script is wired to the same entry point.
"""

import json
import shutil
import subprocess

import pytest

from flockalign.cli import main
from flockalign.recording import read_series, write_series

AGENTS_CFG = """
mode = agents
kernel.type = pareto
kernel.scale = 1.0
kernel.exponent = 0.5
agents.preset = cluster
agents.n = 8
agents.dim = 2
run.t_final = 0.5
run.dt = 0.01
run.record_every = 10
"""

EULER_CFG = """
mode = euler1d
grid.length = 6.283185307179586
grid.cells = 64
kernel.type = constant
kernel.phi0 = 2.0
closure.type = mono_kinetic
init.mass = 12.566370614359172
init.velocity = sine
init.velocity_amplitude = 0.4
run.t_final = 0.5
run.record_dt = 0.1
"""

KINETIC_CFG = """
mode = kinetic
phase.length = 1.0
phase.nx = 16
phase.v_max = 4.0
phase.nv = 32
kernel.type = constant
kernel.phi0 = 1.0
kinetic.sigma = 0.5
init.theta = 0.5
run.t_final = 0.2
run.record_dt = 0.05
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestRuns:
    def test_agents_writes_all_artifacts(self, tmp_path):
        cfg = write_cfg(tmp_path, AGENTS_CFG)
        out = tmp_path / "out"
        assert main(["agents", "--config", cfg, "--out", str(out), "--seed", "3"]) == 0
        for name in ("series.csv", "summary.json", "report.json", "fields_final.csv"):
            assert (out / name).exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["outcome"] == "completed"
        assert summary["n_agents"] == 8
        assert summary["seed"] == 3
        records = read_series(out / "series.csv")
        assert records[0]["t"] == 0.0
        assert records[-1]["t"] == pytest.approx(0.5)

    def test_same_seed_same_bytes(self, tmp_path):
        cfg = write_cfg(tmp_path, AGENTS_CFG)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["agents", "--config", cfg, "--out", str(out), "--seed", "11"]) == 0
            outs.append(out)
        for fname in ("series.csv", "summary.json", "report.json"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()

    def test_different_seed_different_run(self, tmp_path):
        cfg = write_cfg(tmp_path, AGENTS_CFG)
        a, b = tmp_path / "a", tmp_path / "b"
        main(["agents", "--config", cfg, "--out", str(a), "--seed", "1"])
        main(["agents", "--config", cfg, "--out", str(b), "--seed", "2"])
        assert (a / "series.csv").read_bytes() != (b / "series.csv").read_bytes()

    def test_euler_snapshots_and_exit0(self, tmp_path):
        cfg = write_cfg(tmp_path, EULER_CFG + "run.snapshot_dt = 0.25\n")
        out = tmp_path / "out"
        assert main(["euler1d", "--config", cfg, "--out", str(out)]) == 0
        # snapshots land on the first step boundary past each multiple of 0.25
        times = sorted(float(p.stem.split("_")[1]) for p in out.glob("fields_0*.csv"))
        assert len(times) == 3
        assert times[0] == 0.0
        assert 0.25 <= times[1] < 0.4
        assert 0.5 <= times[2] <= 0.5 + 1e-9
        report = json.loads((out / "report.json").read_text())
        assert report["subcritical"] is True

    def test_blowup_exits_3_and_tags_series(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            """
mode = euler1d
grid.length = 6.283185307179586
grid.cells = 128
kernel.type = constant
kernel.phi0 = 0.1
closure.type = mono_kinetic
init.mass = 6.283185307179586
init.velocity = ramp
init.min_slope = -2.0
run.t_final = 2.0
run.record_dt = 0.2
run.detector_factor = 8
""",
        )
        out = tmp_path / "out"
        assert main(["euler1d", "--config", cfg, "--out", str(out)]) == 3
        records = read_series(out / "series.csv")
        assert records[-1]["status"] == "blowup"
        assert all(r["status"] == "" for r in records[:-1])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["outcome"] == "blowup"
        assert 0.0 < summary["blowup_time"] <= 2.0

    def test_kinetic_fills_h_residual_interior(self, tmp_path):
        cfg = write_cfg(tmp_path, KINETIC_CFG)
        out = tmp_path / "out"
        assert main(["kinetic", "--config", cfg, "--out", str(out)]) == 0
        records = read_series(out / "series.csv")
        assert len(records) >= 4
        assert records[0]["h_residual"] is None
        assert records[-1]["h_residual"] is None
        assert all(r["h_residual"] is not None for r in records[1:-1])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["theta_star"] == pytest.approx(0.5, rel=1e-6)

    def test_summary_to_stdout_without_out(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, AGENTS_CFG)
        assert main(["agents", "--config", cfg]) == 0
        printed = json.loads(capsys.readouterr().out)
        assert printed["mode"] == "agents"
        assert printed["outcome"] == "completed"


class TestErrors:
    def test_parse_errors_exit_2_listing_all(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "mode = agents\nbroken line\nmode = euler1d\n")
        assert main(["agents", "--config", cfg]) == 2
        err = capsys.readouterr().err
        assert "line 2" in err
        assert "line 3" in err

    def test_unknown_key_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, AGENTS_CFG + "run.typo = 1\n")
        assert main(["agents", "--config", cfg]) == 2
        assert "unknown key 'run.typo'" in capsys.readouterr().err

    def test_mode_mismatch_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, AGENTS_CFG)
        assert main(["euler1d", "--config", cfg]) == 2
        assert "mode" in capsys.readouterr().err

    def test_missing_config_exit_4(self, tmp_path, capsys):
        assert main(["agents", "--config", str(tmp_path / "absent.cfg")]) == 4
        assert "io error" in capsys.readouterr().err

    def test_missing_required_keys_all_named(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "mode = euler1d\nclosure.type = isentropic\n")
        assert main(["euler1d", "--config", cfg]) == 2
        err = capsys.readouterr().err
        for key in ("grid.length", "grid.cells", "kernel.type",
                    "init.pressure_value", "run.t_final"):
            assert key in err


class TestCertify:
    def test_report_printed_and_written(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, EULER_CFG)
        out = tmp_path / "cert"
        assert main(["certify", "--config", cfg, "--out", str(out)]) == 0
        printed = json.loads(capsys.readouterr().out)
        # tau phi0 m0 / 2 with phi0 = 2, mass = 4 pi
        assert printed["eta_c"] == pytest.approx(12.566370614359172, rel=1e-12)
        assert printed["subcritical"] is True
        on_disk = json.loads((out / "report.json").read_text())
        assert on_disk == printed

    def test_requires_exactly_one_input(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, EULER_CFG)
        assert main(["certify"]) == 2
        assert main(["certify", "--config", cfg, "--monitor", str(tmp_path)]) == 2

    def test_monitor_missing_series_exit_4(self, tmp_path, capsys):
        assert main(["certify", "--monitor", str(tmp_path)]) == 4

    def test_monitor_pass_and_fail(self, tmp_path, capsys):
        rundir = tmp_path / "run"
        rundir.mkdir()
        good = [{"t": 0.0, "delta_u": 1.0}, {"t": 1.0, "delta_u": 0.5}]
        write_series(rundir / "series.csv", good)
        assert main(["certify", "--monitor", str(rundir)]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["ok"] is True

        bad = [{"t": 0.0, "delta_u": 1.0}, {"t": 1.0, "delta_u": 1.5}]
        write_series(rundir / "series.csv", bad)
        assert main(["certify", "--monitor", str(rundir)]) == 3
        result = json.loads(capsys.readouterr().out)
        assert result["ok"] is False
        assert not result["checks"]["delta_u_monotone"]["ok"]

    def test_monitor_full_run_against_report(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, EULER_CFG)
        out = tmp_path / "out"
        assert main(["euler1d", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        assert main(["certify", "--monitor", str(out)]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["ok"] is True
        assert "threshold_persistence" in result["checks"]
        assert "gradient_bound" in result["checks"]

    def test_kinetic_config_not_certifiable(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, KINETIC_CFG)
        assert main(["certify", "--config", cfg]) == 2
        assert "certify needs mode" in capsys.readouterr().err


class TestSweep:
    def test_values_sweep_writes_rows(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            AGENTS_CFG + "sweep.parameter = agents.n\nsweep.values = 4,6,8\n",
        )
        out = tmp_path / "sw"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        data = json.loads((out / "sweep.json").read_text())
        assert [row["value"] for row in data["runs"]] == [4, 6, 8]
        assert all(row["outcome"] == "completed" for row in data["runs"])
        assert (out / "run_01" / "series.csv").exists()
        assert "richardson_orders" not in data

    def test_dt_halving_reports_order(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            """
mode = agents
kernel.type = constant
kernel.phi0 = 1.0
agents.preset = two_body
run.t_final = 0.5
run.dt = 0.02
run.record_every = 5
sweep.parameter = run.dt
sweep.halvings = 3
""",
        )
        out = tmp_path / "sw"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        data = json.loads((out / "sweep.json").read_text())
        orders = data["richardson_orders"]
        assert len(orders) == 1
        assert 3.5 <= orders[0] <= 4.5

    def test_bad_run_recorded_not_fatal(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            AGENTS_CFG + "sweep.parameter = run.dt\nsweep.values = 0.01,-1.0\n",
        )
        out = tmp_path / "sw"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        data = json.loads((out / "sweep.json").read_text())
        assert data["runs"][0]["outcome"] == "completed"
        assert data["runs"][1]["outcome"] == "error"
        assert "dt" in data["runs"][1]["error"]

    def test_sweep_needs_values_or_halvings(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, AGENTS_CFG + "sweep.parameter = run.dt\n")
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "sw")]) == 2
        assert "sweep.values or sweep.halvings" in capsys.readouterr().err


@pytest.mark.skipif(shutil.which("flockalign") is None, reason="console script not on PATH")
def test_console_script_end_to_end(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(AGENTS_CFG)
    out = tmp_path / "out"
    proc = subprocess.run(
        ["flockalign", "agents", "--config", str(cfg), "--out", str(out)],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == str(out)
    assert (out / "summary.json").exists()
