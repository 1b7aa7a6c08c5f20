"""CSV/JSON run artifacts.

Every run writes the same series.csv layout no matter the mode; columns a
mode does not produce stay empty. Floats are written with repr() so the
files round-trip bit-exactly, and summary.json is emitted with sorted keys
so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from typing import Dict, List, Optional

import numpy as np

from .errors import ValidationError

__all__ = [
    "SERIES_COLUMNS",
    "write_series",
    "read_series",
    "write_summary",
    "write_fields",
    "fields_filename",
    "fill_h_residual",
]

SERIES_COLUMNS = [
    "t",
    "delta_u",
    "diameter",
    "mean_u_x",
    "mean_u_y",
    "kinetic_energy",
    "min_thickness",
    "min_eta",
    "max_abs_omega",
    "max_grad_u",
    "max_entropy",
    "pressure_integral",
    "energy_fluctuation",
    "lyapunov_h",
    "tracer_deviation",
    "entropy_residual",
    "h_functional",
    "h_production",
    "h_dissipation",
    "h_residual",
    "status",
]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def write_series(path, records: List[dict], outcome: str = "completed") -> None:
    """Write records as series.csv; a non-completed outcome tags the last row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SERIES_COLUMNS)
        last = len(records) - 1
        for i, rec in enumerate(records):
            row = []
            for col in SERIES_COLUMNS:
                if col == "status":
                    row.append(outcome if (i == last and outcome != "completed") else "")
                else:
                    row.append(_format_cell(rec.get(col)))
            writer.writerow(row)


def read_series(path) -> List[dict]:
    """Inverse of write_series: floats back as floats, empty cells as None."""
    records: List[dict] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError(f"{path}: empty series file")
        for row in reader:
            rec: dict = {}
            for col, cell in zip(header, row):
                if col == "status":
                    rec[col] = cell
                else:
                    rec[col] = float(cell) if cell else None
            records.append(rec)
    return records


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if math.isnan(value) else value
    return value


def write_summary(path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_plain(summary), fh, sort_keys=True, indent=2)
        fh.write("\n")


def fields_filename(t: float) -> str:
    return f"fields_{t:.6f}.csv"


def write_fields(path, state) -> None:
    """Dump a spatial snapshot: grid coordinates plus cell values per row.

    Accepts a field state (rho, u, optional p), a phase state (written as
    its velocity moments rho, u, pressure), or an agent state (one row per
    agent with position and velocity components).
    """
    from .agents import AgentState
    from .euler_grid import FieldState
    from .kinetic import PhaseState, moments

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if isinstance(state, AgentState):
            dim = state.x.shape[1]
            writer.writerow([f"x_{k}" for k in range(dim)] + [f"v_{k}" for k in range(dim)])
            for xi, vi in zip(state.x, state.v):
                writer.writerow([repr(float(c)) for c in xi] + [repr(float(c)) for c in vi])
            return
        if isinstance(state, PhaseState):
            m = moments(state)
            writer.writerow(["x", "rho", "u", "pressure"])
            for i, x in enumerate(state.grid.xs):
                writer.writerow([repr(float(x)), repr(float(m["rho"][i])),
                                 repr(float(m["u"][i])), repr(float(m["pressure"][i]))])
            return
        if not isinstance(state, FieldState):
            raise ValidationError(f"cannot snapshot a {type(state).__name__}")
        grid = state.grid
        has_p = state.p is not None
        if grid.dim == 1:
            header = ["x", "rho", "u"] + (["p"] if has_p else [])
            writer.writerow(header)
            xs = grid.axis_coords(0)
            for i in range(grid.shape[0]):
                row = [repr(float(xs[i])), repr(float(state.rho[i])), repr(float(state.u[i, 0]))]
                if has_p:
                    row.append(repr(float(state.p[i])))
                writer.writerow(row)
        else:
            header = ["x", "y", "rho", "u_x", "u_y"] + (["p"] if has_p else [])
            writer.writerow(header)
            xs, ys = grid.axis_coords(0), grid.axis_coords(1)
            for i in range(grid.shape[0]):
                for j in range(grid.shape[1]):
                    row = [repr(float(xs[i])), repr(float(ys[j])), repr(float(state.rho[i, j])),
                           repr(float(state.u[i, j, 0])), repr(float(state.u[i, j, 1]))]
                    if has_p:
                        row.append(repr(float(state.p[i, j])))
                    writer.writerow(row)


def fill_h_residual(records: List[dict]) -> None:
    """Attach |dH/dt - (production - dissipation)| by centered differences.

    End records stay without a value (one-sided slopes would bias the
    refinement study this column feeds).
    """
    for k in range(1, len(records) - 1):
        prev, cur, nxt = records[k - 1], records[k], records[k + 1]
        needed = (prev.get("h_functional"), nxt.get("h_functional"),
                  cur.get("h_production"), cur.get("h_dissipation"))
        if any(v is None for v in needed):
            continue
        span = nxt["t"] - prev["t"]
        if span <= 0:
            continue
        slope = (nxt["h_functional"] - prev["h_functional"]) / span
        records[k]["h_residual"] = abs(slope - (cur["h_production"] - cur["h_dissipation"]))
