"""The flockalign command line.

Subcommands map one-to-one to the simulation backends (agents, euler1d,
euler2d, kinetic) plus two analysis entries: certify builds a threshold
report from initial data or replays a finished run directory against its
certified bounds (--monitor), and sweep fans a config out over a parameter
list and tabulates the results.

Exit codes: 0 success, 2 config or validation problems, 3 numeric failure
(including a detected gradient blow-up in a single run), 4 file level IO
problems.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
from typing import Dict, List, Optional

import numpy as np

from . import presets
from .agents import AgentState, integrate_agents
from .config import ConfigReader, load_config
from .errors import ConfigError, NumericsError, ValidationError
from .euler_grid import (
    NSA,
    FieldState,
    Grid,
    Isentropic,
    MonoKinetic,
    nsa_entropy_balance_residual,
    run_euler,
)
from .kernels import (
    CompactSupport,
    Constant,
    MetricProfile,
    ParetoTail,
    Topological1D,
    truncate_kernel,
)
from .kinetic import PhaseGrid, PhaseState, run_kinetic
from .recording import (
    fields_filename,
    fill_h_residual,
    read_series,
    write_fields,
    write_series,
    write_summary,
)
from .thresholds import ThresholdReport, certify, monitor

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_RUN_MODES = ("agents", "euler1d", "euler2d", "kinetic")


# --- config -> objects -----------------------------------------------------------


def _build_kernel(r: ConfigReader, prefix: str = "kernel"):
    ktype = r.require(prefix + ".type", str,
                      choices=("constant", "metric", "pareto", "compact", "topological"))
    tau = r.get(prefix + ".tau", float, 1.0)
    floor = r.get(prefix + ".floor", float)
    kernel = None
    if ktype == "constant":
        phi0 = r.require(prefix + ".phi0", float)
        if phi0 is not None and tau is not None:
            kernel = Constant(phi0=phi0, tau=tau)
    elif ktype == "metric":
        shape = r.get(prefix + ".shape", str, "bracket_power",
                      choices=("bracket_power", "gaussian"))
        scale = r.get(prefix + ".scale", float, 1.0)
        power = r.get(prefix + ".power", float, 1.0)
        width = r.get(prefix + ".width", float, 1.0)
        if None not in (shape, scale, power, width, tau):
            kernel = MetricProfile(shape=shape, scale=scale, power=power, width=width, tau=tau)
    elif ktype == "pareto":
        scale = r.get(prefix + ".scale", float, 1.0)
        exponent = r.require(prefix + ".exponent", float)
        if None not in (scale, exponent, tau):
            kernel = ParetoTail(c=scale, theta=exponent, tau=tau)
    elif ktype == "compact":
        radius = r.require(prefix + ".radius", float)
        scale = r.get(prefix + ".scale", float, 1.0)
        if None not in (radius, scale, tau):
            kernel = CompactSupport(radius=radius, scale=scale, tau=tau)
    elif ktype == "topological":
        radial = _build_kernel(r, prefix + ".radial")
        mass_power = r.get(prefix + ".mass_power", float, 1.0)
        mass_scale = r.get(prefix + ".mass_scale", float, 1.0)
        if None not in (radial, mass_power, mass_scale, tau):
            kernel = Topological1D(radial=radial, mass_power=mass_power,
                                   mass_scale=mass_scale, tau=tau)
    if kernel is not None and floor is not None:
        kernel = truncate_kernel(kernel, floor)
    return kernel


def _build_agent_state(r: ConfigReader, seed: int) -> Optional[AgentState]:
    preset = r.require("agents.preset", str, choices=("two_body", "cluster"))
    if preset == "two_body":
        gap = r.get("agents.gap", float, 1.0)
        dv = r.get("agents.dv", float, 1.0)
        dim = r.get("agents.dim", int, 1)
        if None in (gap, dv, dim):
            return None
        return presets.agent_two_body(gap=gap, dv=dv, dim=dim)
    if preset == "cluster":
        n = r.require("agents.n", int)
        dim = r.get("agents.dim", int, 2)
        x_scale = r.get("agents.x_scale", float, 1.0)
        v_scale = r.get("agents.v_scale", float, 1.0)
        if None in (n, dim, x_scale, v_scale):
            return None
        rng = np.random.Generator(np.random.Philox(key=seed))
        return presets.agent_cluster(n, rng, dim=dim, x_scale=x_scale, v_scale=v_scale)
    return None


def _build_density(r: ConfigReader, grid: Optional[Grid]) -> Optional[np.ndarray]:
    kind = r.get("init.density", str, "uniform", choices=("uniform", "cosine"))
    mass = r.get("init.mass", float, 1.0)
    amplitude = mode = None
    if kind == "cosine":
        amplitude = r.get("init.density_amplitude", float, 0.3)
        mode = r.get("init.density_mode", int, 1)
    if grid is None or kind is None or mass is None:
        return None
    if kind == "uniform":
        return presets.density_uniform(grid, mass=mass)
    if amplitude is None or mode is None:
        return None
    return presets.density_cosine(grid, mass=mass, amplitude=amplitude, mode=mode)


def _build_velocity(r: ConfigReader, grid: Optional[Grid]) -> Optional[np.ndarray]:
    kind = r.get("init.velocity", str, "zero",
                 choices=("zero", "sine", "taylor_green", "ramp"))
    params: Dict[str, object] = {}
    if kind == "sine":
        params["amplitude"] = r.get("init.velocity_amplitude", float, 1.0)
        params["mode"] = r.get("init.velocity_mode", int, 1)
        params["component"] = r.get("init.velocity_component", int, 0)
        params["vary_axis"] = r.get("init.vary_axis", int, 0)
    elif kind == "taylor_green":
        params["amplitude"] = r.get("init.velocity_amplitude", float, 1.0)
    elif kind == "ramp":
        params["min_slope"] = r.require("init.min_slope", float)
        params["smoothing"] = r.get("init.smoothing", float, 0.12)
    if grid is None or kind is None or any(v is None for v in params.values()):
        return None
    if kind == "zero":
        return presets.velocity_zero(grid)
    if kind == "sine":
        return presets.velocity_sine(grid, params["amplitude"], mode=params["mode"],
                                     component=params["component"],
                                     vary_axis=params["vary_axis"])
    if kind == "taylor_green":
        return presets.velocity_taylor_green(grid, amplitude=params["amplitude"])
    return presets.velocity_ramp(grid, min_slope=params["min_slope"],
                                 smoothing=params["smoothing"])


def _build_field_state(r: ConfigReader, dim: int):
    grid = None
    if dim == 1:
        length = r.require("grid.length", float)
        cells = r.require("grid.cells", int)
        if length is not None and cells is not None:
            grid = Grid((length,), (cells,))
    else:
        lx = r.require("grid.length_x", float)
        ly = r.require("grid.length_y", float)
        nx = r.require("grid.cells_x", int)
        ny = r.require("grid.cells_y", int)
        if None not in (lx, ly, nx, ny):
            grid = Grid((lx, ly), (nx, ny))

    ctype = r.get("closure.type", str, "mono_kinetic",
                  choices=("mono_kinetic", "isentropic", "nsa"))
    closure = None
    if ctype == "mono_kinetic":
        closure = MonoKinetic()
    elif ctype == "isentropic":
        closure = Isentropic()
    elif ctype == "nsa":
        sigma1 = r.get("closure.sigma1", float, 0.0)
        sigma2 = r.get("closure.sigma2", float, 0.0)
        c_v = r.get("closure.c_v", float, 1.0)
        if None not in (sigma1, sigma2, c_v):
            closure = NSA(sigma1=sigma1, sigma2=sigma2, c_v=c_v)

    rho = _build_density(r, grid)
    u = _build_velocity(r, grid)
    p = None
    if closure is not None and closure.has_pressure:
        pkind = r.get("init.pressure", str, "uniform", choices=("uniform", "scaled"))
        if pkind == "uniform":
            value = r.require("init.pressure_value", float)
            if value is not None and grid is not None:
                p = presets.pressure_uniform(grid, value)
        elif pkind == "scaled":
            coef = r.require("init.pressure_coef", float)
            if coef is not None and rho is not None:
                p = presets.pressure_scaled_density(rho, coef, closure.gamma(grid.dim))
        if p is None:
            return None, None
    if rho is None or u is None or closure is None:
        return None, None
    return FieldState(grid, rho, u, p), closure


def _build_phase_state(r: ConfigReader):
    length = r.require("phase.length", float)
    nx = r.require("phase.nx", int)
    v_max = r.require("phase.v_max", float)
    nv = r.require("phase.nv", int)
    sigma = r.require("kinetic.sigma", float)
    if sigma is not None and sigma < 0:
        r.error(f"kinetic.sigma must be >= 0, got {sigma}")
        sigma = None
    pgrid = None
    if None not in (length, nx, v_max, nv):
        pgrid = PhaseGrid(length=length, nx=nx, v_max=v_max, nv=nv)
    rho = _build_density(r, pgrid.space_grid() if pgrid else None)
    kind = r.get("init.kind", str, "maxwellian", choices=("maxwellian", "two_bump"))
    theta = r.require("init.theta", float)
    bulk = r.get("init.u", float, 0.0)
    if rho is None or kind is None or theta is None or bulk is None or sigma is None:
        return None, None
    if kind == "maxwellian":
        f = presets.maxwellian(pgrid.xs, pgrid.vs, rho, bulk, theta)
    else:
        f = 0.5 * (presets.maxwellian(pgrid.xs, pgrid.vs, rho, bulk, theta)
                   + presets.maxwellian(pgrid.xs, pgrid.vs, rho, -bulk, theta))
    return PhaseState(pgrid, f), sigma


class _RunPlan:
    """Everything a subcommand needs, pulled out of one config mapping."""

    def __init__(self, mode: str, state, kernel, closure=None, sigma=None, run: Optional[dict] = None):
        self.mode = mode
        self.state = state
        self.kernel = kernel
        self.closure = closure
        self.sigma = sigma
        self.run = run or {}


def _read_run_params(r: ConfigReader, mode: str) -> dict:
    params: Dict[str, object] = {"t_final": r.require("run.t_final", float)}
    if mode == "agents":
        params["dt"] = r.require("run.dt", float)
        params["method"] = r.get("run.method", str, "rk4", choices=("rk4", "euler"))
        params["record_every"] = r.get("run.record_every", int, 1)
    else:
        params["dt"] = r.get("run.dt", float)
        params["cfl"] = r.get("run.cfl", float, 0.4)
        params["record_dt"] = r.get("run.record_dt", float)
        if mode in ("euler1d", "euler2d"):
            params["snapshot_dt"] = r.get("run.snapshot_dt", float)
            params["detector_factor"] = r.get("run.detector_factor", float, 100.0)
            params["tracers"] = r.get("run.tracers", int, 0)
    return params


def _build_plan(cfg: dict, mode: str, seed: int, for_run: bool = True) -> _RunPlan:
    r = ConfigReader(cfg)
    declared = r.get("mode", str)
    if declared is not None and declared != mode:
        r.error(f"config says mode = {declared!r} but the {mode!r} subcommand was invoked")
    closure = sigma = None
    if mode == "agents":
        kernel = _build_kernel(r)
        state = _build_agent_state(r, seed)
    elif mode in ("euler1d", "euler2d"):
        kernel = _build_kernel(r)
        state, closure = _build_field_state(r, 1 if mode == "euler1d" else 2)
    elif mode == "kinetic":
        kernel = _build_kernel(r)
        state, sigma = _build_phase_state(r)
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    run = _read_run_params(r, mode) if for_run else None
    allow = ["sweep", "certify"] + ([] if for_run else ["run"])
    r.finish(allow_unused=allow)
    return _RunPlan(mode, state, kernel, closure=closure, sigma=sigma, run=run)


# --- running ---------------------------------------------------------------------


def _try_certify(plan: _RunPlan) -> Optional[ThresholdReport]:
    if plan.mode == "kinetic":
        return None
    try:
        return certify(plan.state, plan.kernel)
    except ValidationError:
        return None


def _execute(plan: _RunPlan):
    """Run a built plan; returns (records, outcome, summary, snapshots)."""
    run = plan.run
    summary: Dict[str, object] = {"mode": plan.mode, "t_final": run["t_final"]}
    snapshots = None
    if plan.mode == "agents":
        res = integrate_agents(plan.state, plan.kernel, run["t_final"], run["dt"],
                               method=run["method"], record_every=run["record_every"])
        records, outcome = res.records, res.outcome
        summary.update(n_steps=res.n_steps, n_agents=plan.state.x.shape[0],
                       final_time=res.state.t)
    elif plan.mode in ("euler1d", "euler2d"):
        res = run_euler(plan.state, plan.kernel, plan.closure, run["t_final"],
                        dt=run["dt"], cfl=run["cfl"], record_dt=run["record_dt"],
                        snapshot_dt=run["snapshot_dt"],
                        detector_factor=run["detector_factor"],
                        n_tracers=run["tracers"])
        records, outcome = res.records, res.outcome
        snapshots = res.snapshots
        summary.update(n_steps=res.n_steps, final_time=res.state.t,
                       blowup_time=res.blowup_time, pressure_clips=res.pressure_clips,
                       detector_threshold=res.detector_threshold,
                       mass_initial=plan.state.mass, mass_final=res.state.mass)
        if (isinstance(plan.closure, NSA) and snapshots is not None and len(snapshots) >= 3
                and outcome == "completed"):
            balance = nsa_entropy_balance_residual(snapshots, plan.kernel, plan.closure)
            summary["entropy_balance"] = balance
    else:
        res = run_kinetic(plan.state, plan.kernel, plan.sigma, run["t_final"],
                          dt=run["dt"], cfl=run["cfl"], record_dt=run["record_dt"])
        records, outcome = res.records, res.outcome
        fill_h_residual(records)
        summary.update(n_steps=res.n_steps, final_time=res.state.t, sigma=plan.sigma)
        if isinstance(plan.kernel, Constant) and plan.kernel.tau > 0 and plan.sigma > 0:
            mass = plan.state.mass
            summary["theta_star"] = plan.sigma / (plan.kernel.tau * plan.kernel.phi0 * mass)
    summary["outcome"] = outcome
    if records:
        summary["final_record"] = {k: v for k, v in records[-1].items()}
    return records, outcome, summary, res.state, snapshots


def _emit(out: Optional[str], records, outcome, summary, report, final_state, snapshots,
          verbose: bool) -> None:
    if out is None:
        print(json.dumps(_jsonable(summary), sort_keys=True, indent=2))
        return
    os.makedirs(out, exist_ok=True)
    write_series(os.path.join(out, "series.csv"), records, outcome)
    write_summary(os.path.join(out, "summary.json"), summary)
    if report is not None:
        with open(os.path.join(out, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_jsonable(report.as_dict()), fh, sort_keys=True, indent=2)
            fh.write("\n")
    if snapshots:
        for snap in snapshots:
            write_fields(os.path.join(out, fields_filename(snap.t)), snap)
    write_fields(os.path.join(out, "fields_final.csv"), final_state)
    if verbose:
        print(f"wrote {out}", file=sys.stderr)


def _jsonable(value):
    from .recording import _plain

    return _plain(value)


def _cmd_run(args, mode: str) -> int:
    cfg = load_config(args.config)
    plan = _build_plan(cfg, mode, args.seed)
    report = _try_certify(plan)
    if args.verbose:
        print(f"{mode}: starting t_final = {plan.run['t_final']}", file=sys.stderr)
    records, outcome, summary, final_state, snapshots = _execute(plan)
    summary["seed"] = args.seed
    if report is not None:
        summary["subcritical"] = report.subcritical
    _emit(args.out, records, outcome, summary, report, final_state, snapshots, args.verbose)
    if args.out is not None:
        print(args.out)
    return EXIT_OK if outcome == "completed" else EXIT_NUMERIC


# --- certify ---------------------------------------------------------------------


def _load_report(path: str) -> ThresholdReport:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path} is not valid JSON: {e}") from e
    try:
        return ThresholdReport(**data)
    except TypeError as e:
        raise ValidationError(f"{path} is not a threshold report: {e}") from e


def _cmd_certify(args) -> int:
    if (args.monitor is None) == (args.config is None):
        raise ValidationError("certify needs exactly one of --config or --monitor")
    if args.monitor is not None:
        series_path = os.path.join(args.monitor, "series.csv")
        if not os.path.exists(series_path):
            print(f"io error: no series.csv under {args.monitor}", file=sys.stderr)
            return EXIT_IO
        records = read_series(series_path)
        report_path = os.path.join(args.monitor, "report.json")
        report = _load_report(report_path) if os.path.exists(report_path) else None
        result = monitor(records, report)
        print(json.dumps(_jsonable(result.as_dict()), sort_keys=True, indent=2))
        return EXIT_OK if result.ok else EXIT_NUMERIC

    cfg = load_config(args.config)
    mode = cfg.get("mode")
    if mode not in ("agents", "euler1d", "euler2d"):
        raise ValidationError(
            f"certify needs mode = agents, euler1d or euler2d in the config, got {mode!r}"
        )
    plan = _build_plan(cfg, mode, args.seed, for_run=False)
    allow = args.allow_approximate or bool(cfg.get("certify.allow_approximate", False))
    report = certify(plan.state, plan.kernel, allow_approximate=allow)
    print(json.dumps(_jsonable(report.as_dict()), sort_keys=True, indent=2))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_jsonable(report.as_dict()), fh, sort_keys=True, indent=2)
            fh.write("\n")
    return EXIT_OK


# --- sweep -----------------------------------------------------------------------


def _sweep_values(r: ConfigReader, cfg: dict, parameter: str) -> List[object]:
    raw = r.get("sweep.values", str)
    halvings = r.get("sweep.halvings", int)
    if (raw is None) == (halvings is None):
        r.error("sweep needs exactly one of sweep.values or sweep.halvings")
        return []
    if raw is not None:
        from .config import _convert

        values = [_convert(part.strip()) for part in raw.split(",") if part.strip()]
        if not values:
            r.error("sweep.values is empty")
        return values
    if halvings < 2:
        r.error(f"sweep.halvings must be >= 2, got {halvings}")
        return []
    base = cfg.get(parameter)
    if not isinstance(base, (int, float)) or isinstance(base, bool):
        r.error(f"sweep.halvings needs a numeric base value for {parameter!r} in the config")
        return []
    return [float(base) / 2**k for k in range(halvings)]


def _sweep_worker(base_cfg: dict, mode: str, rundir: str, seed: int):
    try:
        plan = _build_plan(base_cfg, mode, seed)
        report = _try_certify(plan)
        records, outcome, summary, final_state, snapshots = _execute(plan)
        summary["seed"] = seed
        _emit(rundir, records, outcome, summary, report, final_state, snapshots, False)
        return summary
    except (ValidationError, NumericsError) as e:
        return {"outcome": "error", "error": str(e)}


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    mode = cfg.get("mode")
    if mode not in _RUN_MODES:
        raise ValidationError(f"sweep needs mode set to one of {_RUN_MODES} in the config")
    r = ConfigReader({k: v for k, v in cfg.items() if k.startswith("sweep.")})
    parameter = r.require("sweep.parameter", str)
    metric = r.get("sweep.metric", str, "delta_u")
    values = _sweep_values(r, cfg, parameter) if parameter else []
    r.finish()

    base = {k: v for k, v in cfg.items() if not k.startswith("sweep.")}
    os.makedirs(args.out, exist_ok=True)
    jobs = []
    for i, value in enumerate(values):
        run_cfg = dict(base)
        run_cfg[parameter] = value
        jobs.append((run_cfg, os.path.join(args.out, f"run_{i:02d}")))

    workers = args.workers or min(4, len(jobs))
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_sweep_worker, jc, mode, rd, args.seed) for jc, rd in jobs]
        summaries = [f.result() for f in futures]

    rows = []
    for value, (run_cfg, rundir), summary in zip(values, jobs, summaries):
        row = {"value": value, "dir": os.path.basename(rundir),
               "outcome": summary.get("outcome")}
        if summary.get("outcome") == "error":
            row["error"] = summary["error"]
        else:
            row["n_steps"] = summary.get("n_steps")
            if metric == "blowup_time":
                row["metric"] = summary.get("blowup_time")
            else:
                final = summary.get("final_record") or {}
                row["metric"] = final.get(metric)
            row["blowup_time"] = summary.get("blowup_time")
        rows.append(row)

    sweep_summary: Dict[str, object] = {
        "mode": mode,
        "parameter": parameter,
        "metric": metric,
        "runs": rows,
    }
    orders = _richardson_orders(parameter, values, rows)
    if orders is not None:
        sweep_summary["richardson_orders"] = orders
    write_summary(os.path.join(args.out, "sweep.json"), sweep_summary)
    if args.verbose:
        print(f"wrote {args.out}/sweep.json", file=sys.stderr)
    print(args.out)
    return EXIT_OK


def _richardson_orders(parameter: str, values, rows) -> Optional[List[Optional[float]]]:
    """Observed convergence orders for a step-halving sweep, None otherwise."""
    if not parameter.endswith("dt") or len(values) < 3:
        return None
    try:
        vals = [float(v) for v in values]
    except (TypeError, ValueError):
        return None
    if any(not math.isclose(a / 2, b, rel_tol=1e-9) for a, b in zip(vals, vals[1:])):
        return None
    metrics = []
    for row in rows:
        m = row.get("metric")
        if not isinstance(m, (int, float)):
            return None
        metrics.append(float(m))
    orders: List[Optional[float]] = []
    for a, b, c in zip(metrics, metrics[1:], metrics[2:]):
        coarse, fine = abs(a - b), abs(b - c)
        orders.append(math.log2(coarse / fine) if coarse > 0 and fine > 0 else None)
    return orders


# --- entry point -----------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
    p.add_argument("--config", required=config_required, help="path to a key = value config file")
    p.add_argument("--out", help="directory for series.csv / summary.json / snapshots")
    p.add_argument("--seed", type=int, default=0, help="Philox seed for random presets")
    p.add_argument("--verbose", action="store_true", help="progress notes on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flockalign",
        description="Alignment dynamics: particle, hydrodynamic and kinetic solvers "
                    "with threshold certification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("agents", "integrate the pairwise alignment ODE system"),
        ("euler1d", "run the 1D alignment hydrodynamics solver"),
        ("euler2d", "run the 2D alignment hydrodynamics solver"),
        ("kinetic", "run the 1D phase-space alignment solver"),
    ):
        _add_common(sub.add_parser(name, help=blurb))
    pc = sub.add_parser("certify", help="threshold report from initial data, or replay a run")
    _add_common(pc, config_required=False)
    pc.add_argument("--monitor", help="finished run directory to check against its report")
    pc.add_argument("--allow-approximate", action="store_true",
                    help="accept kernels whose bounds come from a numeric scan")
    ps = sub.add_parser("sweep", help="run a config across a list of parameter values")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out", required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--workers", type=int)
    ps.add_argument("--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in _RUN_MODES:
            return _cmd_run(args, args.command)
        if args.command == "certify":
            return _cmd_certify(args)
        return _cmd_sweep(args)
    except ConfigError as e:
        print(f"config error:\n{e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
