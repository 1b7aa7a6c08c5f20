"""Certification of threshold and flocking bounds from initial data.

``certify`` inspects a grid state (or, with reduced scope, an agent state)
and assembles a :class:`ThresholdReport`: the critical threshold margin, the
amplitude condition gating it, predicted gradient/spin bounds for smooth
evolution, and, for fat-tailed kernels, the dispersion radius and flocking
rate. ``monitor`` then replays recorded diagnostics against those numbers.

All quantities derive from sup/gradient envelopes of the kernel
(:func:`flockalign.kernels.kernel_bounds`) and integrals of the initial
fields; nothing here advances the dynamics, and repeated calls are
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .agents import AgentState
from .errors import ValidationError
from .euler_grid import (
    FieldState,
    NonlocalOperator,
    max_gradient_norm,
    sym_gradient_spectrum,
)
from .kernels import Constant, Kernel, KernelBounds, ParetoTail, kernel_bounds, pair_matrix

__all__ = [
    "ThresholdReport",
    "MonitorResult",
    "certify",
    "flocking_predictions",
    "energy_fluctuation",
    "monitor",
]


@dataclass(frozen=True)
class ThresholdReport:
    """Numbers certified from initial data; None marks fields that do not
    apply to the input kind (agent states carry no velocity gradient)."""

    tau: float
    m0: float
    eta_phi: float          # min over x of the initial thickness phi * rho
    eta_c: float            # tau eta_phi / 2
    eta_min0: Optional[float]   # min over x of lambda_min(grad_S u0) + tau rhobar0
    delta_u0: float
    diameter0: Optional[float]
    kinetic_energy0: float
    alpha0: float           # sup |grad_x phi| * delta_u0
    beta0: float            # sup |(grad_x + grad_y) phi| * sqrt(2 E0 / m0)
    amplitude_ok: bool      # (8 alpha0 + 4 beta0) m0 < tau eta_phi^2
    subcritical: Optional[bool]
    gamma0: Optional[float]
    delta0: Optional[float]
    predicted_gradient_bound: Optional[float]
    max_grad_u0: Optional[float]
    max_omega0: Optional[float]
    d_inf: Optional[float]
    predicted_flock_rate: Optional[float]
    predicted_eta_phi: Optional[float]
    phi_plus: float
    grad_x_sup: float
    sym_grad_sup: float
    approximate_bounds: bool

    def as_dict(self) -> dict:
        return asdict(self)


def flocking_predictions(kernel: Kernel, m0: float, delta_u0: float, diameter0: float) -> dict:
    """Unconditional dispersion and decay-rate bounds for flocking kernels.

    Fat-tailed kernels use the Lyapunov pairing
    H0 = C tau m0 <D0>^(1-theta) + (1-theta) delta_u0 with <D> = sqrt(1+D^2):
    the dispersion never exceeds d_inf = (H0 / (C tau m0))^(1/(1-theta))
    and the velocity spread decays at least at rate tau m0 C d_inf^(-theta).
    Constant kernels flock at exactly tau phi0 m0, confining the spread to
    diameter0 + delta_u0 / rate.
    """
    if m0 <= 0 or delta_u0 < 0 or diameter0 < 0:
        raise ValidationError("flocking predictions need m0 > 0 and non-negative spreads")
    if isinstance(kernel, ParetoTail):
        if kernel.tau <= 0:
            raise ValidationError("flocking predictions need tau > 0")
        c, theta, tau = kernel.c, kernel.theta, kernel.tau
        bracket0 = math.sqrt(1.0 + diameter0 * diameter0)
        h0 = c * tau * m0 * bracket0 ** (1.0 - theta) + (1.0 - theta) * delta_u0
        d_inf = (h0 / (c * tau * m0)) ** (1.0 / (1.0 - theta))
        rate = tau * m0 * c * d_inf ** (-theta)
        return {
            "h0": h0,
            "d_inf": d_inf,
            "rate": rate,
            "eta_phi": c * d_inf ** (-theta) * m0,
        }
    if isinstance(kernel, Constant):
        if kernel.tau <= 0:
            raise ValidationError("flocking predictions need tau > 0")
        rate = kernel.tau * kernel.phi0 * m0
        return {
            "h0": None,
            "d_inf": diameter0 + delta_u0 / rate,
            "rate": rate,
            "eta_phi": kernel.phi0 * m0,
        }
    raise ValidationError(
        f"no unconditional flocking bound for {type(kernel).__name__} kernels"
    )


def energy_fluctuation(state, closure=None) -> float:
    """Two-point energy spread delta-E^2.

    For a density rho with velocity u and internal energy e this is
    (1/2 m0) double-integral of (|u(x) - u(y)|^2 / 2 + e(x) + e(y)) drho drho,
    which collapses to [m0 I(rho |u|^2) - |I(rho u)|^2 + 2 m0 I(rho e)]/(2 m0).
    Agent states use equal weights 1/N and e = 0.
    """
    if isinstance(state, AgentState):
        v = state.v
        vbar = v.mean(axis=0)
        return 0.5 * float((v * v).sum(axis=1).mean() - vbar @ vbar)
    if isinstance(state, FieldState):
        vol = state.grid.cell_volume
        m0 = state.mass
        if m0 <= 0:
            raise ValidationError("energy fluctuation needs positive total mass")
        rho_u2 = float((state.rho * (state.u**2).sum(-1)).sum() * vol)
        mom = [float((state.rho * state.u[..., c]).sum() * vol) for c in range(state.grid.dim)]
        internal = 0.0
        if state.p is not None:
            if closure is None or not closure.has_pressure:
                raise ValidationError("a pressure field needs its closure for delta-E^2")
            gamma = closure.gamma(state.grid.dim)
            internal = float(state.p.sum() * vol) / (gamma - 1.0)
        return (m0 * rho_u2 - sum(m * m for m in mom) + 2.0 * m0 * internal) / (2.0 * m0)
    raise ValidationError(f"unsupported state type {type(state).__name__}")


def _field_spreads(state: FieldState):
    # 1D spreads are exact ranges; 2D uses bounding-box diagonals, which
    # overestimate by at most sqrt(2) and keep every derived bound valid.
    du2 = 0.0
    for c in range(state.grid.dim):
        comp = state.u[..., c]
        du2 += float(comp.max() - comp.min()) ** 2
    diam = math.sqrt(sum((0.5 * ln) ** 2 for ln in state.grid.lengths))
    return math.sqrt(du2), diam


def certify(
    state,
    kernel: Kernel,
    allow_approximate: bool = False,
) -> ThresholdReport:
    """Build a :class:`ThresholdReport` from initial data.

    Grid states get the full report (threshold margin, amplitude condition,
    gradient/spin predictions); agent states get the mass, spread, amplitude
    and flocking blocks, with gradient-based entries None. Kernels whose
    bounds are finite-difference estimates are rejected unless
    ``allow_approximate`` is set.
    """
    if isinstance(state, FieldState):
        return _certify_field(state, kernel, allow_approximate)
    if isinstance(state, AgentState):
        return _certify_agents(state, kernel, allow_approximate)
    raise ValidationError(f"cannot certify {type(state).__name__}")


def _resolve_bounds(kernel: Kernel, rho_sup: Optional[float], allow_approximate: bool) -> KernelBounds:
    bounds = kernel_bounds(kernel, rho_sup=rho_sup)
    if bounds.approximate and not allow_approximate:
        raise ValidationError(
            "kernel bounds are finite-difference estimates; pass allow_approximate=True "
            "to certify with them"
        )
    return bounds


def _amplitude_block(tau, m0, eta_phi, delta_u0, e0, bounds):
    alpha0 = bounds.grad_x_sup * delta_u0
    beta0 = bounds.sym_grad_sup * math.sqrt(2.0 * e0 / m0) if m0 > 0 else 0.0
    amplitude_ok = (8.0 * alpha0 + 4.0 * beta0) * m0 < tau * eta_phi**2
    return alpha0, beta0, amplitude_ok


def _flocking_block(kernel, m0, delta_u0, diameter0):
    if isinstance(kernel, (ParetoTail, Constant)) and kernel.tau > 0 and diameter0 is not None:
        pred = flocking_predictions(kernel, m0, delta_u0, diameter0)
        return pred["d_inf"], pred["rate"], pred["eta_phi"]
    return None, None, None


def _certify_field(state: FieldState, kernel: Kernel, allow_approximate: bool) -> ThresholdReport:
    tau = kernel.tau
    bounds = _resolve_bounds(kernel, float(state.rho.max()), allow_approximate)
    op = NonlocalOperator(kernel, state.grid)
    rho_bar = op.apply(state.rho, rho=state.rho)
    eta_phi = float(rho_bar.min())
    m0 = state.mass
    lam_min, _, omega = sym_gradient_spectrum(state)
    eta_min0 = float((lam_min + tau * rho_bar).min())
    delta_u0, diameter0 = _field_spreads(state)
    vol = state.grid.cell_volume
    e0 = 0.5 * float((state.rho * (state.u**2).sum(-1)).sum() * vol)
    alpha0, beta0, amplitude_ok = _amplitude_block(tau, m0, eta_phi, delta_u0, e0, bounds)
    eta_c = 0.5 * tau * eta_phi
    max_grad0 = max_gradient_norm(state)
    max_omega0 = float(np.abs(omega).max())
    gamma0 = max(max_omega0, 0.25 * tau * eta_phi)
    delta0 = 0.125 * tau * eta_phi + (gamma0**2 / (tau * eta_phi) if tau * eta_phi > 0 else 0.0)
    bound = max(max_grad0, 0.25 * tau * eta_phi, delta0, tau * bounds.phi_plus * m0)
    d_inf, rate, eta_phi_pred = _flocking_block(kernel, m0, delta_u0, diameter0)
    return ThresholdReport(
        tau=tau,
        m0=m0,
        eta_phi=eta_phi,
        eta_c=eta_c,
        eta_min0=eta_min0,
        delta_u0=delta_u0,
        diameter0=diameter0,
        kinetic_energy0=e0,
        alpha0=alpha0,
        beta0=beta0,
        amplitude_ok=bool(amplitude_ok),
        subcritical=bool(eta_min0 >= eta_c and amplitude_ok),
        gamma0=gamma0,
        delta0=delta0,
        predicted_gradient_bound=bound,
        max_grad_u0=max_grad0,
        max_omega0=max_omega0,
        d_inf=d_inf,
        predicted_flock_rate=rate,
        predicted_eta_phi=eta_phi_pred,
        phi_plus=bounds.phi_plus,
        grad_x_sup=bounds.grad_x_sup,
        sym_grad_sup=bounds.sym_grad_sup,
        approximate_bounds=bounds.approximate,
    )


def _certify_agents(state: AgentState, kernel: Kernel, allow_approximate: bool) -> ThresholdReport:
    tau = kernel.tau
    rho_sup = None  # empirical measures have no density sup; topological rejected below
    try:
        bounds = _resolve_bounds(kernel, rho_sup, allow_approximate)
    except ValidationError as exc:
        raise ValidationError(f"cannot certify agents with this kernel: {exc}") from exc
    w = pair_matrix(kernel, state.x)
    eta_phi = float(w.mean(axis=1).min())
    m0 = 1.0
    dx = state.x[:, None, :] - state.x[None, :, :]
    dv = state.v[:, None, :] - state.v[None, :, :]
    diameter0 = float(np.sqrt((dx * dx).sum(-1).max()))
    delta_u0 = float(np.sqrt((dv * dv).sum(-1).max()))
    e0 = 0.5 * float((state.v**2).sum(axis=1).mean())
    alpha0, beta0, amplitude_ok = _amplitude_block(tau, m0, eta_phi, delta_u0, e0, bounds)
    d_inf, rate, eta_phi_pred = _flocking_block(kernel, m0, delta_u0, diameter0)
    return ThresholdReport(
        tau=tau,
        m0=m0,
        eta_phi=eta_phi,
        eta_c=0.5 * tau * eta_phi,
        eta_min0=None,
        delta_u0=delta_u0,
        diameter0=diameter0,
        kinetic_energy0=e0,
        alpha0=alpha0,
        beta0=beta0,
        amplitude_ok=bool(amplitude_ok),
        subcritical=None,
        gamma0=None,
        delta0=None,
        predicted_gradient_bound=None,
        max_grad_u0=None,
        max_omega0=None,
        d_inf=d_inf,
        predicted_flock_rate=rate,
        predicted_eta_phi=eta_phi_pred,
        phi_plus=bounds.phi_plus,
        grad_x_sup=bounds.grad_x_sup,
        sym_grad_sup=bounds.sym_grad_sup,
        approximate_bounds=bounds.approximate,
    )


@dataclass
class MonitorResult:
    ok: bool
    checks: dict  # name -> {"ok": bool, "detail": str}

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": self.checks}


def _series(records: Sequence[dict], key: str):
    ts, vals = [], []
    for r in records:
        v = r.get(key)
        if v is not None and not (isinstance(v, float) and math.isnan(v)):
            ts.append(r["t"])
            vals.append(float(v))
    return np.array(ts), np.array(vals)


def _nonincreasing(name, ts, vals, slack):
    rises = np.diff(vals) > slack
    if rises.any():
        i = int(np.argmax(rises))
        return {
            "ok": False,
            "detail": f"{name} rises from {vals[i]:.6g} to {vals[i+1]:.6g} at t = {ts[i+1]:.6g}",
        }
    return {"ok": True, "detail": f"{name} non-increasing over {len(vals)} records"}


def monitor(
    records: Sequence[dict],
    report: Optional[ThresholdReport] = None,
    eta_slack: float = 0.01,
    grad_slack: float = 0.05,
    envelope_slack: float = 0.01,
    monotone_slack: float = 1e-9,
) -> MonitorResult:
    """Replay recorded diagnostics against certified bounds.

    Monotonicity checks (velocity spread, energy fluctuation, Lyapunov
    pairing, entropy max) always run on whichever columns are present;
    threshold persistence, gradient/spin bounds, the pressure envelope and
    the dispersion radius additionally need a ``report``.
    """
    if not records:
        raise ValidationError("monitor needs at least one record")
    checks = {}

    for key, label in (
        ("delta_u", "velocity spread"),
        ("energy_fluctuation", "energy fluctuation"),
        ("lyapunov_h", "Lyapunov pairing"),
        ("max_entropy", "entropy max"),
    ):
        ts, vals = _series(records, key)
        if len(vals) >= 2:
            slack = monotone_slack * max(1.0, float(np.abs(vals).max()))
            checks[key + "_monotone"] = _nonincreasing(label, ts, vals, slack)

    if report is not None:
        ts, eta = _series(records, "min_eta")
        if len(eta) and report.eta_c is not None:
            floor = report.eta_c * (1.0 - eta_slack)
            bad = eta < floor
            checks["threshold_persistence"] = {
                "ok": not bad.any(),
                "detail": (
                    f"min eta {eta.min():.6g} vs floor {floor:.6g}"
                    if bad.any()
                    else f"eta stayed >= {eta.min():.6g} (floor {floor:.6g})"
                ),
            }
        ts, grad = _series(records, "max_grad_u")
        if len(grad) and report.predicted_gradient_bound is not None:
            cap = report.predicted_gradient_bound * (1.0 + grad_slack)
            checks["gradient_bound"] = {
                "ok": bool((grad <= cap).all()),
                "detail": f"max |grad u| {grad.max():.6g} vs cap {cap:.6g}",
            }
        ts, om = _series(records, "max_abs_omega")
        if len(om) and report.gamma0 is not None:
            cap = report.gamma0 * (1.0 + grad_slack)
            checks["spin_bound"] = {
                "ok": bool((om <= cap).all()),
                "detail": f"max |omega| {om.max():.6g} vs cap {cap:.6g}",
            }
        ts, pint = _series(records, "pressure_integral")
        if len(pint) >= 2 and report.eta_c is not None and pint[0] > 0:
            envelope = pint[0] * np.exp(-report.eta_c * (ts - ts[0])) * (1.0 + envelope_slack)
            ok = bool((pint <= envelope).all())
            worst = float((pint / envelope).max())
            checks["pressure_decay"] = {
                "ok": ok,
                "detail": f"worst integrated-pressure/envelope ratio {worst:.6g}",
            }
        ts, diam = _series(records, "diameter")
        if len(diam) and report.d_inf is not None:
            cap = report.d_inf * (1.0 + envelope_slack)
            checks["dispersion_bound"] = {
                "ok": bool((diam <= cap).all()),
                "detail": f"max diameter {diam.max():.6g} vs cap {cap:.6g}",
            }

    return MonitorResult(ok=all(c["ok"] for c in checks.values()), checks=checks)
