"""Artifact files: exact column layout, lossless float round trip, sorted JSON."""

import json
import math

import numpy as np
import pytest

from flockalign.errors import ValidationError
from flockalign.euler_grid import FieldState, Grid
from flockalign.kinetic import PhaseGrid, PhaseState
from flockalign.presets import density_cosine, maxwellian, velocity_sine
from flockalign.recording import (
    SERIES_COLUMNS,
    fields_filename,
    fill_h_residual,
    read_series,
    write_fields,
    write_series,
    write_summary,
)

GOLDEN_HEADER = (
    "t,delta_u,diameter,mean_u_x,mean_u_y,kinetic_energy,min_thickness,min_eta,"
    "max_abs_omega,max_grad_u,max_entropy,pressure_integral,energy_fluctuation,"
    "lyapunov_h,tracer_deviation,entropy_residual,h_functional,h_production,"
    "h_dissipation,h_residual,status"
)


class TestSeries:
    def test_header_is_stable(self, tmp_path):
        path = tmp_path / "series.csv"
        write_series(path, [])
        assert path.read_text().splitlines()[0] == GOLDEN_HEADER
        assert GOLDEN_HEADER.split(",") == SERIES_COLUMNS

    def test_round_trip_preserves_floats_and_gaps(self, tmp_path):
        records = [
            {"t": 0.0, "delta_u": 1.0 / 3.0, "mean_u_y": None, "max_grad_u": 0.1 + 0.2},
            {"t": 0.5, "delta_u": 7.125e-17},
        ]
        path = tmp_path / "series.csv"
        write_series(path, records)
        back = read_series(path)
        assert back[0]["t"] == 0.0
        assert back[0]["delta_u"] == 1.0 / 3.0
        assert back[0]["max_grad_u"] == 0.1 + 0.2
        assert back[0]["mean_u_y"] is None
        assert back[0]["diameter"] is None  # never written
        assert back[1]["delta_u"] == 7.125e-17
        assert back[0]["status"] == ""

    def test_outcome_tags_only_last_row(self, tmp_path):
        records = [{"t": 0.0}, {"t": 0.1}, {"t": 0.2}]
        path = tmp_path / "series.csv"
        write_series(path, records, outcome="blowup")
        back = read_series(path)
        assert [r["status"] for r in back] == ["", "", "blowup"]

    def test_nan_written_as_empty(self, tmp_path):
        path = tmp_path / "series.csv"
        write_series(path, [{"t": 0.0, "delta_u": float("nan")}])
        assert read_series(path)[0]["delta_u"] is None

    def test_numpy_scalars_accepted(self, tmp_path):
        path = tmp_path / "series.csv"
        write_series(path, [{"t": np.float64(0.25), "delta_u": np.float64(1e-9)}])
        back = read_series(path)
        assert back[0]["t"] == 0.25
        assert back[0]["delta_u"] == 1e-9

    def test_read_rejects_empty_file(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("")
        with pytest.raises(ValidationError):
            read_series(path)


class TestSummary:
    def test_sorted_keys_and_numpy_coercion(self, tmp_path):
        path = tmp_path / "summary.json"
        write_summary(path, {"zeta": np.float64(1.5), "alpha": np.int64(3),
                             "flag": np.bool_(True), "arr": np.arange(3),
                             "nested": {"nan": float("nan")}})
        text = path.read_text()
        assert text.index('"alpha"') < text.index('"arr"') < text.index('"zeta"')
        data = json.loads(text)
        assert data == {"zeta": 1.5, "alpha": 3, "flag": True,
                        "arr": [0, 1, 2], "nested": {"nan": None}}

    def test_identical_summaries_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        payload = {"b": 2, "a": [1.5, None], "c": {"y": 0.1, "x": True}}
        write_summary(a, payload)
        write_summary(b, dict(reversed(list(payload.items()))))
        assert a.read_bytes() == b.read_bytes()


class TestFields:
    def test_1d_with_pressure(self, tmp_path):
        grid = Grid((2.0,), (8,))
        rho = density_cosine(grid, mass=2.0, amplitude=0.2)
        u = velocity_sine(grid, 0.3)
        state = FieldState(grid, rho, u, p=np.full(8, 0.75))
        path = tmp_path / "f.csv"
        write_fields(path, state)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,rho,u,p"
        assert len(lines) == 9
        first = lines[1].split(",")
        assert float(first[0]) == grid.axis_coords(0)[0]
        assert float(first[3]) == 0.75

    def test_2d_monokinetic_header(self, tmp_path):
        grid = Grid((1.0, 2.0), (4, 6))
        state = FieldState(grid, np.ones((4, 6)), np.zeros((4, 6, 2)))
        path = tmp_path / "f.csv"
        write_fields(path, state)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y,rho,u_x,u_y"
        assert len(lines) == 1 + 4 * 6

    def test_phase_state_written_as_moments(self, tmp_path):
        g = PhaseGrid(length=1.0, nx=8, v_max=2.0, nv=16)
        st = PhaseState(g, maxwellian(g.xs, g.vs, np.ones(8), 0.25, 0.1))
        path = tmp_path / "f.csv"
        write_fields(path, st)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,rho,u,pressure"
        # v-domain truncation at ~5.5 sigma biases the moment at the 1e-8 level
        u_vals = [float(row.split(",")[2]) for row in lines[1:]]
        assert u_vals == pytest.approx([0.25] * 8, abs=1e-6)

    def test_agents_written_as_rows(self, tmp_path):
        from flockalign.presets import agent_two_body

        state = agent_two_body(gap=1.0, dv=0.5, dim=2)
        path = tmp_path / "f.csv"
        write_fields(path, state)
        lines = path.read_text().splitlines()
        assert lines[0] == "x_0,x_1,v_0,v_1"
        assert len(lines) == 3

    def test_rejects_unknown_payload(self, tmp_path):
        with pytest.raises(ValidationError):
            write_fields(tmp_path / "f.csv", object())

    def test_filename_format(self):
        assert fields_filename(0.5) == "fields_0.500000.csv"
        assert fields_filename(1.0 / 3.0) == "fields_0.333333.csv"


class TestHResidual:
    def test_exact_on_linear_h(self):
        # H(t) = 3t, production - dissipation = 3: residual must be 0
        records = [
            {"t": float(k), "h_functional": 3.0 * k, "h_production": 5.0, "h_dissipation": 2.0}
            for k in range(4)
        ]
        fill_h_residual(records)
        assert "h_residual" not in records[0]
        assert records[1]["h_residual"] == pytest.approx(0.0, abs=1e-14)
        assert records[2]["h_residual"] == pytest.approx(0.0, abs=1e-14)
        assert "h_residual" not in records[3]

    def test_measures_imbalance(self):
        records = [
            {"t": float(k), "h_functional": 3.0 * k, "h_production": 5.0, "h_dissipation": 0.0}
            for k in range(3)
        ]
        fill_h_residual(records)
        assert records[1]["h_residual"] == pytest.approx(2.0)

    def test_skips_records_missing_columns(self):
        records = [{"t": 0.0}, {"t": 1.0}, {"t": 2.0}]
        fill_h_residual(records)
        assert all("h_residual" not in r for r in records)
