"""Interacting-agent velocity alignment.

N agents with equal weight 1/N (total mass 1) obey

    dx_i/dt = v_i
    dv_i/dt = (tau / N) * sum_j phi(x_i, x_j) (v_j - v_i)

with phi a kernel from :mod:`flockalign.kernels` and tau the strength stored
on it. Symmetric weights make the mean velocity an exact invariant; the
velocity hull can only shrink (max principle), which is what the flocking
certificates quantify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .errors import ValidationError
from .kernels import Kernel, ParetoTail, kernel_floor, pair_matrix

__all__ = [
    "AgentState",
    "AgentRunResult",
    "cs_acceleration",
    "integrate_agents",
    "agent_diagnostics",
    "truncation_radius",
]


@dataclass
class AgentState:
    """Positions and velocities, shape (N, d) each."""

    x: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        self.v = np.atleast_2d(np.asarray(self.v, dtype=float))
        if self.x.shape != self.v.shape:
            raise ValidationError(
                f"positions {self.x.shape} and velocities {self.v.shape} disagree"
            )
        if self.x.shape[0] < 1:
            raise ValidationError("need at least one agent")

    def copy(self) -> "AgentState":
        return AgentState(self.x.copy(), self.v.copy(), self.t)


def cs_acceleration(x: np.ndarray, v: np.ndarray, kernel: Kernel) -> np.ndarray:
    """Alignment acceleration (tau/N) sum_j phi_ij (v_j - v_i) for all agents."""
    n = x.shape[0]
    w = pair_matrix(kernel, x)
    return (kernel.tau / n) * (w @ v - w.sum(axis=1)[:, None] * v)


def _rhs(x, v, kernel):
    return v, cs_acceleration(x, v, kernel)


def _step_rk4(x, v, kernel, dt):
    kx1, kv1 = _rhs(x, v, kernel)
    kx2, kv2 = _rhs(x + 0.5 * dt * kx1, v + 0.5 * dt * kv1, kernel)
    kx3, kv3 = _rhs(x + 0.5 * dt * kx2, v + 0.5 * dt * kv2, kernel)
    kx4, kv4 = _rhs(x + dt * kx3, v + dt * kv3, kernel)
    xn = x + (dt / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4)
    vn = v + (dt / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4)
    return xn, vn


def _step_euler(x, v, kernel, dt):
    kx, kv = _rhs(x, v, kernel)
    return x + dt * kx, v + dt * kv


_STEPPERS = {"rk4": _step_rk4, "euler": _step_euler}


@dataclass
class AgentRunResult:
    state: AgentState
    records: List[dict]
    outcome: str  # "completed" | "nan"
    n_steps: int
    states: Optional[List[AgentState]] = None


def agent_diagnostics(state: AgentState, kernel: Kernel) -> dict:
    """Scalar diagnostics for one snapshot.

    delta_u and diameter are max pairwise l2 spreads; min_thickness is the
    smallest averaged kernel weight seen by any agent; energy_fluctuation is
    the two-point kinetic spread (1/2)(mean |v|^2 - |mean v|^2), identical to
    the double-sum form for equal weights. Pareto kernels additionally get the
    Lyapunov pairing H = C tau <D>^(1-theta) + (1-theta) delta_u.
    """
    x, v = state.x, state.v
    dx = x[:, None, :] - x[None, :, :]
    dv = v[:, None, :] - v[None, :, :]
    diameter = float(np.sqrt((dx * dx).sum(-1).max()))
    delta_u = float(np.sqrt((dv * dv).sum(-1).max()))
    vbar = v.mean(axis=0)
    ke = 0.5 * float((v * v).sum(axis=1).mean())
    thickness = pair_matrix(kernel, x).mean(axis=1)
    out = {
        "t": state.t,
        "delta_u": delta_u,
        "diameter": diameter,
        "mean_u_x": float(vbar[0]),
        "mean_u_y": float(vbar[1]) if v.shape[1] > 1 else None,
        "kinetic_energy": ke,
        "min_thickness": float(thickness.min()),
        "energy_fluctuation": 0.5 * float((v * v).sum(axis=1).mean() - vbar @ vbar),
        "lyapunov_h": None,
    }
    if isinstance(kernel, ParetoTail):
        bracket = np.sqrt(1.0 + diameter * diameter)
        out["lyapunov_h"] = float(
            kernel.c * kernel.tau * bracket ** (1.0 - kernel.theta)
            + (1.0 - kernel.theta) * delta_u
        )
    return out


def integrate_agents(
    state: AgentState,
    kernel: Kernel,
    t_final: float,
    dt: float,
    method: str = "rk4",
    record_every: int = 1,
    store_states: bool = False,
    diagnostics: Optional[Callable[[AgentState], dict]] = None,
) -> AgentRunResult:
    """Fixed-step integration to t_final, recording every record_every steps.

    The first and last snapshots are always recorded. A non-finite position
    or velocity aborts the run with outcome "nan" (records up to the failure
    are kept). t_final that is not an exact multiple of dt gets a final
    shortened step.
    """
    if method not in _STEPPERS:
        raise ValidationError(f"unknown method {method!r}; expected one of {sorted(_STEPPERS)}")
    if dt <= 0 or not np.isfinite(dt):
        raise ValidationError(f"dt must be finite and > 0, got {dt}")
    if t_final < 0 or not np.isfinite(t_final):
        raise ValidationError(f"t_final must be finite and >= 0, got {t_final}")
    if record_every < 1:
        raise ValidationError(f"record_every must be >= 1, got {record_every}")

    step = _STEPPERS[method]
    diag = diagnostics or (lambda s: agent_diagnostics(s, kernel))
    cur = state.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        records = [diag(cur)]
    states = [cur.copy()] if store_states else None

    n_full = int(np.floor(t_final / dt + 1e-12))
    tail = t_final - n_full * dt
    steps = [dt] * n_full + ([tail] if tail > 1e-12 * max(dt, 1.0) else [])

    outcome = "completed"
    done = 0
    for i, h in enumerate(steps, start=1):
        # Overflow/invalid warnings are expected on the way to a nan abort.
        with np.errstate(over="ignore", invalid="ignore"):
            cur.x, cur.v = step(cur.x, cur.v, kernel, h)
        cur.t = state.t + (i * dt if i <= n_full else t_final)
        done = i
        if not (np.isfinite(cur.x).all() and np.isfinite(cur.v).all()):
            outcome = "nan"
            break
        if i % record_every == 0 or i == len(steps):
            records.append(diag(cur))
            if store_states:
                states.append(cur.copy())
    return AgentRunResult(cur, records, outcome, done, states)


def truncation_radius(state: AgentState, rate: float) -> float:
    """Radius containing every future pair distance for an exponentially flocking run.

    With deviations from the mean decaying at least like exp(-rate t), agent i
    never strays farther than |x_i - xbar| + |v_i - vbar| / rate from the
    (linearly moving) center of mass, so pair distances stay below twice the
    max of that over agents.
    """
    if rate <= 0 or not np.isfinite(rate):
        raise ValidationError(f"rate must be finite and > 0, got {rate}")
    xc = state.x - state.x.mean(axis=0)
    vc = state.v - state.v.mean(axis=0)
    reach = np.sqrt((xc * xc).sum(1)) + np.sqrt((vc * vc).sum(1)) / rate
    return 2.0 * float(reach.max())
