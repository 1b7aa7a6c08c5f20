"""Finite-volume solver for nonlocal Euler alignment systems on periodic grids.

State is (rho, u) or (rho, u, p) on a uniform cell-centered grid in 1D or 2D:

    rho_t + div(rho u) = 0
    u_t + u . grad u   = tau [ phi*(rho u) - u phi*rho ] - grad p / rho + diffusion
    p_t + u . grad p + gamma p div u = -2 tau (phi*rho) p + heating

Closures: mono-kinetic (no pressure, division-free), isentropic (gamma fixed
at 1 + 2/dim by the closure), and a 1D viscous/heat-conducting extension with
momentum diffusion sigma1 and temperature diffusion sigma2 acting through
C_v T = p / ((gamma - 1) rho).

Scheme: first-order upwind transport, conservative upwind mass flux, strong
stability preserving two-stage Runge-Kutta in time. Pressure closures add
Rusanov dissipation scaled by the sound speed to u and p: the acoustic
subsystem is centrally differenced and would be linearly unstable without an
upwinding mechanism on its characteristics. The dissipation telescopes (no
effect on total mass or integrated pressure) and vanishes on uniform states
and everywhere for the mono-kinetic closure (zero sound speed).

Nonlocal products phi*f use midpoint quadrature with minimum-image periodic
distances; radial kernels reduce to a circulant convolution evaluated by FFT
(identical to the dense-matrix sum to roundoff), while topological kernels
rebuild a dense matrix from the current density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import CflError, ValidationError, VacuumError
from .kernels import Kernel, Topological1D, kernel_bounds

__all__ = [
    "Grid",
    "FieldState",
    "MonoKinetic",
    "Isentropic",
    "NSA",
    "NonlocalOperator",
    "thickness",
    "alignment_rhs",
    "pde_rhs",
    "step",
    "sym_gradient_spectrum",
    "max_gradient_norm",
    "entropy_field",
    "euler_diagnostics",
    "run_euler",
    "nsa_entropy_balance_residual",
    "EulerRunResult",
]

DEFAULT_CFL = 0.4
VACUUM_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic cell-centered grid; lengths and shape per axis."""

    lengths: Tuple[float, ...]
    shape: Tuple[int, ...]

    def __post_init__(self):
        if len(self.lengths) != len(self.shape) or not (1 <= len(self.shape) <= 2):
            raise ValidationError(f"grid must be 1D or 2D, got {self.lengths} / {self.shape}")
        for L, m in zip(self.lengths, self.shape):
            if not (math.isfinite(L) and L > 0):
                raise ValidationError(f"domain length must be positive, got {L}")
            if m < 4:
                raise ValidationError(f"need at least 4 cells per axis, got {m}")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def dx(self) -> Tuple[float, ...]:
        return tuple(L / m for L, m in zip(self.lengths, self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.dx))

    def axis_coords(self, ax: int) -> np.ndarray:
        h = self.dx[ax]
        return (np.arange(self.shape[ax]) + 0.5) * h

    def min_image_offsets(self, ax: int) -> np.ndarray:
        """Signed periodic offsets of every cell from cell 0 along one axis."""
        h, L = self.dx[ax], self.lengths[ax]
        d = np.arange(self.shape[ax]) * h
        return (d + 0.5 * L) % L - 0.5 * L


@dataclass(frozen=True)
class MonoKinetic:
    """Pressureless closure; the momentum equation sees alignment only."""

    has_pressure = False

    def gamma(self, dim: int) -> float:  # pragma: no cover - not used, kept uniform
        return 1.0 + 2.0 / dim


@dataclass(frozen=True)
class Isentropic:
    """p-law closure; the exponent is pinned to gamma = 1 + 2/dim."""

    has_pressure = True

    def gamma(self, dim: int) -> float:
        return 1.0 + 2.0 / dim


@dataclass(frozen=True)
class NSA:
    """1D closure with momentum diffusion sigma1 and heat conduction sigma2.

    Temperature enters through C_v T = p / ((gamma - 1) rho); gamma = 3 in 1D.
    """

    sigma1: float = 0.0
    sigma2: float = 0.0
    c_v: float = 1.0

    has_pressure = True

    def __post_init__(self):
        for name in ("sigma1", "sigma2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")
        if not (math.isfinite(self.c_v) and self.c_v > 0):
            raise ValidationError(f"c_v must be finite and > 0, got {self.c_v}")

    def gamma(self, dim: int) -> float:
        return 3.0


@dataclass
class FieldState:
    """Density, velocity (last axis = component), optional pressure, time."""

    grid: Grid
    rho: np.ndarray
    u: np.ndarray
    p: Optional[np.ndarray] = None
    t: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        shape = self.grid.shape
        if self.rho.shape != shape:
            raise ValidationError(f"rho shape {self.rho.shape} does not match grid {shape}")
        if self.u.shape == shape and self.grid.dim == 1:
            self.u = self.u[..., None]
        if self.u.shape != shape + (self.grid.dim,):
            raise ValidationError(
                f"u shape {self.u.shape} does not match grid {shape} + ({self.grid.dim},)"
            )
        if self.p is not None:
            self.p = np.asarray(self.p, dtype=float)
            if self.p.shape != shape:
                raise ValidationError(f"p shape {self.p.shape} does not match grid {shape}")
        if np.any(self.rho < 0):
            raise ValidationError("initial density must be non-negative")

    def copy(self) -> "FieldState":
        return FieldState(
            self.grid,
            self.rho.copy(),
            self.u.copy(),
            None if self.p is None else self.p.copy(),
            self.t,
        )

    @property
    def mass(self) -> float:
        return float(self.rho.sum()) * self.grid.cell_volume


class NonlocalOperator:
    """Applies f -> integral of phi(x, y) f(y) dy on a periodic grid.

    Radial kernels precompute the FFT of the circulant stencil once;
    topological kernels (1D) rebuild a dense matrix from the density passed
    to :meth:`apply`, caching it per density array.
    """

    def __init__(self, kernel: Kernel, grid: Grid):
        self.kernel = kernel
        self.grid = grid
        self.topological = isinstance(kernel, Topological1D)
        if self.topological:
            if grid.dim != 1:
                raise ValidationError("topological kernels are 1D only")
            centers = grid.axis_coords(0)
            d = centers[None, :] - centers[:, None]
            L = grid.lengths[0]
            self._radial_part = kernel.radial.profile(np.abs((d + 0.5 * L) % L - 0.5 * L))
            idx = np.arange(grid.shape[0])
            self._forward_steps = (idx[None, :] - idx[:, None]) % grid.shape[0]
            self._cache_key = None
            self._cache_matrix = None
        else:
            grids = np.meshgrid(
                *[grid.min_image_offsets(ax) for ax in range(grid.dim)], indexing="ij"
            )
            r = np.sqrt(sum(g * g for g in grids))
            stencil = np.asarray(kernel.profile(r), dtype=float)
            self._stencil_hat = np.fft.rfftn(stencil)

    def _topological_matrix(self, rho: np.ndarray) -> np.ndarray:
        if self._cache_key is rho:
            return self._cache_matrix
        grid = self.grid
        dx = grid.dx[0]
        n = grid.shape[0]
        # Trapezoid mass between consecutive cell centers, accumulated.
        seg = 0.5 * (rho + np.roll(rho, -1)) * dx
        cum = np.concatenate([[0.0], np.cumsum(seg)])  # cum[k] = mass from center 0 to center k
        total = cum[-1]
        fwd = cum[self._forward_steps]
        # Mass along the minimum-image arc between the two centers.
        arc = np.where(self._forward_steps <= n // 2, fwd, total - fwd)
        w = self._radial_part * self.kernel.mass_profile(arc)
        self._cache_key = rho
        self._cache_matrix = w
        return w

    def apply(self, f: np.ndarray, rho: Optional[np.ndarray] = None) -> np.ndarray:
        """Midpoint quadrature of integral phi(x, y) f(y) dy."""
        if self.topological:
            if rho is None:
                raise ValidationError("topological kernels need the current density")
            w = self._topological_matrix(rho)
            return (w @ f) * self.grid.cell_volume
        axes = tuple(range(self.grid.dim))
        out = np.fft.irfftn(np.fft.rfftn(f) * self._stencil_hat, s=self.grid.shape, axes=axes)
        return out * self.grid.cell_volume

    def dense_matrix(self, rho: Optional[np.ndarray] = None) -> np.ndarray:
        """Dense quadrature matrix (1D only); the direct-summation reference."""
        if self.grid.dim != 1:
            raise ValidationError("dense_matrix is provided for 1D grids only")
        if self.topological:
            return self._topological_matrix(rho)
        centers = self.grid.axis_coords(0)
        d = centers[None, :] - centers[:, None]
        L = self.grid.lengths[0]
        r = np.abs((d + 0.5 * L) % L - 0.5 * L)
        return np.asarray(self.kernel.profile(r), dtype=float)


def thickness(state: FieldState, kernel: Kernel, op: Optional[NonlocalOperator] = None) -> np.ndarray:
    """Nonlocal density average rho_bar = phi * rho."""
    op = op or NonlocalOperator(kernel, state.grid)
    return op.apply(state.rho, rho=state.rho)


# --- difference stencils (periodic) ------------------------------------------


def _central(f: np.ndarray, h: float, ax: int) -> np.ndarray:
    return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * h)


def _second(f: np.ndarray, h: float, ax: int) -> np.ndarray:
    return (np.roll(f, -1, axis=ax) - 2.0 * f + np.roll(f, 1, axis=ax)) / (h * h)


def _upwind_term(f: np.ndarray, vel: np.ndarray, h: float, ax: int) -> np.ndarray:
    """vel * df/dx with one-sided differences chosen by the sign of vel."""
    fwd = (np.roll(f, -1, axis=ax) - f) / h
    bwd = (f - np.roll(f, 1, axis=ax)) / h
    return np.where(vel > 0.0, vel * bwd, vel * fwd)


def _mass_divergence(rho: np.ndarray, u: np.ndarray, grid: Grid) -> np.ndarray:
    """div(rho u) via conservative upwind interface fluxes; telescopes exactly."""
    out = np.zeros_like(rho)
    for ax in range(grid.dim):
        h = grid.dx[ax]
        uc = u[..., ax]
        uf = 0.5 * (uc + np.roll(uc, -1, axis=ax))
        flux = rho * np.maximum(uf, 0.0) + np.roll(rho, -1, axis=ax) * np.minimum(uf, 0.0)
        out += (flux - np.roll(flux, 1, axis=ax)) / h
    return out


def _rusanov(q: np.ndarray, speed: np.ndarray, grid: Grid) -> np.ndarray:
    """Telescoping interface dissipation sum_ax d/dx [ a_{i+1/2} (q_{i+1} - q_i) ] / 2."""
    out = np.zeros_like(q)
    for ax in range(grid.dim):
        h = grid.dx[ax]
        a = np.maximum(speed, np.roll(speed, -1, axis=ax))
        d = 0.5 * a * (np.roll(q, -1, axis=ax) - q)
        out += (d - np.roll(d, 1, axis=ax)) / h
    return out


# --- right-hand sides ---------------------------------------------------------


def alignment_rhs(state: FieldState, kernel: Kernel, op: Optional[NonlocalOperator] = None) -> np.ndarray:
    """tau [ phi*(rho u) - u (phi*rho) ] per velocity component."""
    op = op or NonlocalOperator(kernel, state.grid)
    rho_bar = op.apply(state.rho, rho=state.rho)
    out = np.empty_like(state.u)
    for c in range(state.u.shape[-1]):
        flux = op.apply(state.rho * state.u[..., c], rho=state.rho)
        out[..., c] = kernel.tau * (flux - state.u[..., c] * rho_bar)
    return out


def _sound_speed(state: FieldState, gamma: float, rho_floor: float) -> np.ndarray:
    rho_safe = np.maximum(state.rho, rho_floor)
    return np.sqrt(gamma * np.maximum(state.p, 0.0) / rho_safe)


def pde_rhs(
    state: FieldState,
    kernel: Kernel,
    closure,
    op: Optional[NonlocalOperator] = None,
    rho_floor: Optional[float] = None,
):
    """Time derivatives (rho_dot, u_dot, p_dot or None)."""
    grid = state.grid
    op = op or NonlocalOperator(kernel, grid)
    if rho_floor is None:
        rho_floor = VACUUM_FLOOR_REL * state.mass / np.prod(grid.lengths)
    if isinstance(closure, NSA) and grid.dim != 1:
        raise ValidationError("the NSA closure is available in 1D only")

    rho, u, p = state.rho, state.u, state.p
    rho_dot = -_mass_divergence(rho, u, grid)

    rho_bar = op.apply(rho, rho=rho)
    u_dot = np.empty_like(u)
    for c in range(grid.dim):
        conv = sum(_upwind_term(u[..., c], u[..., ax], grid.dx[ax], ax) for ax in range(grid.dim))
        flux = op.apply(rho * u[..., c], rho=rho)
        u_dot[..., c] = -conv + kernel.tau * (flux - u[..., c] * rho_bar)

    if not closure.has_pressure:
        return rho_dot, u_dot, None

    if p is None:
        raise ValidationError("pressure closure requires a pressure field")
    if np.any(rho <= rho_floor):
        cell = int(np.argmax(rho.ravel() <= rho_floor))
        idx = tuple(int(i) for i in np.unravel_index(cell, rho.shape))
        raise VacuumError(
            f"density {rho[idx]:.3e} at cell {idx} is below the vacuum floor "
            f"{rho_floor:.3e} under a pressure closure"
        )

    gamma = closure.gamma(grid.dim)
    cs = _sound_speed(state, gamma, rho_floor)
    div_u = sum(_central(u[..., ax], grid.dx[ax], ax) for ax in range(grid.dim))

    for c in range(grid.dim):
        u_dot[..., c] += -_central(p, grid.dx[c], c) / rho + _rusanov(u[..., c], cs, grid)

    p_conv = sum(_upwind_term(p, u[..., ax], grid.dx[ax], ax) for ax in range(grid.dim))
    p_dot = -p_conv - gamma * p * div_u - 2.0 * kernel.tau * rho_bar * p + _rusanov(p, cs, grid)

    if isinstance(closure, NSA):
        h = grid.dx[0]
        ux = _central(u[..., 0], h, 0)
        temp = p / ((gamma - 1.0) * closure.c_v * rho)
        u_dot[..., 0] += closure.sigma1 * _second(u[..., 0], h, 0) / rho
        p_dot = p_dot + (gamma - 1.0) * (
            closure.sigma1 * ux * ux + closure.sigma2 * _second(temp, h, 0)
        )
    return rho_dot, u_dot, p_dot


def admissible_dt(
    state: FieldState,
    kernel: Kernel,
    closure,
    op: Optional[NonlocalOperator] = None,
    cfl: float = DEFAULT_CFL,
    rho_floor: Optional[float] = None,
) -> float:
    """Largest stable step: advective CFL, diffusive cap, alignment relaxation."""
    grid = state.grid
    op = op or NonlocalOperator(kernel, grid)
    if rho_floor is None:
        rho_floor = VACUUM_FLOOR_REL * state.mass / np.prod(grid.lengths)
    gamma = closure.gamma(grid.dim) if closure.has_pressure else 0.0
    cs = _sound_speed(state, gamma, rho_floor) if closure.has_pressure else 0.0
    caps = []
    for ax in range(grid.dim):
        vmax = float(np.max(np.abs(state.u[..., ax]) + cs))
        if vmax > 0:
            caps.append(cfl * grid.dx[ax] / vmax)
    rho_bar_max = float(np.max(op.apply(state.rho, rho=state.rho)))
    if kernel.tau * rho_bar_max > 0:
        caps.append(cfl / (kernel.tau * rho_bar_max))
    if isinstance(closure, NSA):
        rho_min = float(np.maximum(state.rho, rho_floor).min())
        nu = max(closure.sigma1 / rho_min, closure.sigma2 / (closure.c_v * rho_min))
        if nu > 0:
            caps.append(0.25 * grid.dx[0] ** 2 / nu)
    return min(caps) if caps else math.inf


def step(
    state: FieldState,
    kernel: Kernel,
    closure,
    dt: float,
    op: Optional[NonlocalOperator] = None,
    rho_floor: Optional[float] = None,
    check_cfl: bool = True,
    cfl: float = DEFAULT_CFL,
):
    """One SSP-RK2 (Heun) step; returns (new_state, pressure_clip_count)."""
    if dt <= 0 or not math.isfinite(dt):
        raise ValidationError(f"dt must be finite and > 0, got {dt}")
    op = op or NonlocalOperator(kernel, state.grid)
    if check_cfl:
        cap = admissible_dt(state, kernel, closure, op, cfl=cfl, rho_floor=rho_floor)
        if dt > cap * (1.0 + 1e-9):
            raise CflError(f"dt = {dt:.6g} exceeds the admissible step {cap:.6g}")

    def euler(s: FieldState) -> FieldState:
        rd, ud, pd = pde_rhs(s, kernel, closure, op, rho_floor=rho_floor)
        return FieldState(
            s.grid,
            s.rho + dt * rd,
            s.u + dt * ud,
            None if pd is None else s.p + dt * pd,
            s.t + dt,
        )

    s1 = euler(state)
    s2 = euler(s1)
    rho = 0.5 * (state.rho + s2.rho)
    u = 0.5 * (state.u + s2.u)
    p = None if state.p is None or s2.p is None else 0.5 * (state.p + s2.p)
    clips = 0
    if p is not None:
        neg = p < 0.0
        clips = int(neg.sum())
        if clips:
            p = np.where(neg, 0.0, p)
    return FieldState(state.grid, rho, u, p, state.t + dt), clips


# --- diagnostics ---------------------------------------------------------------


def sym_gradient_spectrum(state: FieldState):
    """Eigenvalues of the symmetric velocity gradient and the spin magnitude.

    Returns (lam_min, lam_max, omega) arrays. In 1D both eigenvalues are u_x
    and omega is identically zero; in 2D the spectrum is mean +/- radius of
    the deviatoric part and omega = (d_x u2 - d_y u1) / 2.
    """
    grid = state.grid
    if grid.dim == 1:
        ux = _central(state.u[..., 0], grid.dx[0], 0)
        return ux, ux.copy(), np.zeros_like(ux)
    u1, u2 = state.u[..., 0], state.u[..., 1]
    s11 = _central(u1, grid.dx[0], 0)
    s22 = _central(u2, grid.dx[1], 1)
    u1y = _central(u1, grid.dx[1], 1)
    u2x = _central(u2, grid.dx[0], 0)
    s12 = 0.5 * (u1y + u2x)
    mean = 0.5 * (s11 + s22)
    radius = np.sqrt(0.25 * (s11 - s22) ** 2 + s12 * s12)
    omega = 0.5 * (u2x - u1y)
    return mean - radius, mean + radius, omega


def max_gradient_norm(state: FieldState) -> float:
    """Max over cells of the spectral norm of the full velocity gradient."""
    grid = state.grid
    if grid.dim == 1:
        return float(np.abs(_central(state.u[..., 0], grid.dx[0], 0)).max())
    u1, u2 = state.u[..., 0], state.u[..., 1]
    j11 = _central(u1, grid.dx[0], 0)
    j12 = _central(u1, grid.dx[1], 1)
    j21 = _central(u2, grid.dx[0], 0)
    j22 = _central(u2, grid.dx[1], 1)
    # Largest singular value of a 2x2 matrix from its Frobenius norm and determinant.
    half_frob = 0.5 * (j11 * j11 + j12 * j12 + j21 * j21 + j22 * j22)
    det = j11 * j22 - j12 * j21
    sig2 = half_frob + np.sqrt(np.maximum(half_frob * half_frob - det * det, 0.0))
    return float(np.sqrt(sig2.max()))


def entropy_field(state: FieldState, closure, rho_floor: Optional[float] = None) -> np.ndarray:
    """Specific entropy S = ln(p rho^-gamma); NaN on vacuum or zero-pressure cells."""
    if not closure.has_pressure or state.p is None:
        raise ValidationError("entropy is defined for pressure closures only")
    if rho_floor is None:
        rho_floor = VACUUM_FLOOR_REL * state.mass / np.prod(state.grid.lengths)
    gamma = closure.gamma(state.grid.dim)
    ok = (state.rho > rho_floor) & (state.p > 0.0)
    if not ok.any():
        raise ValidationError("entropy undefined: no cell has positive density and pressure")
    out = np.full(state.rho.shape, np.nan)
    out[ok] = np.log(state.p[ok]) - gamma * np.log(state.rho[ok])
    return out


def _pairwise_component_spread(u: np.ndarray, dim: int) -> float:
    # 1D: exact max pairwise spread; 2D: bounding-box diagonal (upper bound).
    spread = 0.0
    for c in range(dim):
        comp = u[..., c]
        spread += (comp.max() - comp.min()) ** 2
    return math.sqrt(spread)


def euler_diagnostics(
    state: FieldState,
    kernel: Kernel,
    closure,
    op: Optional[NonlocalOperator] = None,
) -> dict:
    """Scalar diagnostics for one snapshot (keys shared with the CSV schema)."""
    grid = state.grid
    op = op or NonlocalOperator(kernel, grid)
    vol = grid.cell_volume
    rho_bar = op.apply(state.rho, rho=state.rho)
    lam_min, _, omega = sym_gradient_spectrum(state)
    mass = state.mass
    mom = [float((state.rho * state.u[..., c]).sum() * vol) for c in range(grid.dim)]
    ke = 0.5 * float((state.rho * (state.u**2).sum(-1)).sum() * vol)
    rec = {
        "t": state.t,
        "delta_u": _pairwise_component_spread(state.u, grid.dim),
        "diameter": None,
        "mean_u_x": mom[0] / mass,
        "mean_u_y": mom[1] / mass if grid.dim > 1 else None,
        "kinetic_energy": ke,
        "min_thickness": float(rho_bar.min()),
        "min_eta": float((lam_min + kernel.tau * rho_bar).min()),
        "max_abs_omega": float(np.abs(omega).max()),
        "max_grad_u": max_gradient_norm(state),
        "max_entropy": None,
        "pressure_integral": None,
        "energy_fluctuation": None,
        "lyapunov_h": None,
        "mass": mass,
    }
    internal = 0.0
    if closure.has_pressure and state.p is not None:
        gamma = closure.gamma(grid.dim)
        rec["pressure_integral"] = float(state.p.sum() * vol)
        internal = rec["pressure_integral"] / (gamma - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = entropy_field(state, closure)
        rec["max_entropy"] = float(np.nanmax(s))
    # delta-E^2 = [m0 I(rho |u|^2) - |I(rho u)|^2 + 2 m0 I(rho e)] / (2 m0)
    mom_sq = sum(m * m for m in mom)
    rec["energy_fluctuation"] = (mass * 2.0 * ke - mom_sq + 2.0 * mass * internal) / (2.0 * mass)
    return rec


# --- tracer transport (1D mono-kinetic invariant) ------------------------------


def _interp_periodic(f: np.ndarray, x: np.ndarray, grid: Grid) -> np.ndarray:
    """Linear interpolation of a cell-centered 1D field at arbitrary points."""
    L = grid.lengths[0]
    h = grid.dx[0]
    n = grid.shape[0]
    s = (np.asarray(x) % L) / h - 0.5
    i0 = np.floor(s).astype(int)
    w = s - i0
    return (1.0 - w) * f[i0 % n] + w * f[(i0 + 1) % n]


class TracerSet:
    """Passive tracers carrying the 1D invariant (u_x + tau rho_bar) / rho.

    For metric kernels in 1D the quantity e = u_x + tau rho_bar satisfies a
    continuity equation, so e / rho is constant along particle paths; the
    recorded deviation from each tracer's initial value measures the scheme's
    transport error (first order in the cell size).
    """

    def __init__(self, n_tracers: int, state: FieldState, kernel: Kernel, op: NonlocalOperator):
        if state.grid.dim != 1:
            raise ValidationError("tracers are available on 1D grids only")
        self.x = (np.arange(n_tracers) + 0.5) * state.grid.lengths[0] / n_tracers
        self.initial = self._values(state, kernel, op)

    def _values(self, state: FieldState, kernel: Kernel, op: NonlocalOperator) -> np.ndarray:
        grid = state.grid
        e = _central(state.u[..., 0], grid.dx[0], 0) + kernel.tau * op.apply(state.rho, rho=state.rho)
        ratio = e / np.maximum(state.rho, VACUUM_FLOOR_REL * state.mass / grid.lengths[0])
        return _interp_periodic(ratio, self.x, grid)

    def advect(self, before: FieldState, after: FieldState, dt: float) -> None:
        grid = before.grid
        u0 = _interp_periodic(before.u[..., 0], self.x, grid)
        x_star = self.x + dt * u0
        u1 = _interp_periodic(after.u[..., 0], x_star, grid)
        self.x = (self.x + 0.5 * dt * (u0 + u1)) % grid.lengths[0]

    def deviation(self, state: FieldState, kernel: Kernel, op: NonlocalOperator) -> float:
        return float(np.abs(self._values(state, kernel, op) - self.initial).max())


# --- run loop -------------------------------------------------------------------


@dataclass
class EulerRunResult:
    state: FieldState
    records: List[dict]
    outcome: str  # "completed" | "blowup" | "nan"
    n_steps: int
    blowup_time: Optional[float] = None
    snapshots: Optional[List[FieldState]] = None
    pressure_clips: int = 0
    detector_threshold: Optional[float] = None


def run_euler(
    state: FieldState,
    kernel: Kernel,
    closure,
    t_final: float,
    dt: Optional[float] = None,
    cfl: float = DEFAULT_CFL,
    record_dt: Optional[float] = None,
    snapshot_dt: Optional[float] = None,
    detector_factor: float = 100.0,
    n_tracers: int = 0,
) -> EulerRunResult:
    """Integrate to t_final with records every record_dt time units.

    dt = None picks the admissible step each iteration (capped to land
    exactly on t_final); a fixed dt is validated against the CFL bound every
    step. The blow-up detector aborts once max |grad u| reaches
    detector_factor times its initial value (records up to the firing are
    kept, outcome "blowup"). Non-finite fields abort with outcome "nan".
    """
    if t_final < 0 or not math.isfinite(t_final):
        raise ValidationError(f"t_final must be finite and >= 0, got {t_final}")
    if detector_factor <= 1:
        raise ValidationError(f"detector_factor must exceed 1, got {detector_factor}")
    grid = state.grid
    op = NonlocalOperator(kernel, grid)
    rho_floor = VACUUM_FLOOR_REL * state.mass / float(np.prod(grid.lengths))
    record_dt = record_dt if record_dt is not None else (t_final / 200.0 if t_final > 0 else 1.0)
    if record_dt <= 0:
        raise ValidationError(f"record_dt must be > 0, got {record_dt}")

    tracers = None
    if n_tracers:
        if not isinstance(closure, MonoKinetic):
            raise ValidationError("tracer invariants apply to the mono-kinetic closure only")
        tracers = TracerSet(n_tracers, state, kernel, op)

    def diag(s: FieldState) -> dict:
        rec = euler_diagnostics(s, kernel, closure, op)
        if tracers is not None:
            rec["tracer_deviation"] = tracers.deviation(s, kernel, op)
        return rec

    cur = state.copy()
    records = [diag(cur)]
    snapshots = [cur.copy()] if snapshot_dt is not None else None
    grad_ref = max(max_gradient_norm(cur), 1e-6)
    threshold = detector_factor * grad_ref

    outcome = "completed"
    blowup_time = None
    clips_total = 0
    n_steps = 0
    next_record = record_dt
    next_snapshot = snapshot_dt if snapshot_dt is not None else math.inf

    while cur.t < t_final - 1e-12 * max(t_final, 1.0):
        if dt is None:
            h = admissible_dt(cur, kernel, closure, op, cfl=cfl, rho_floor=rho_floor)
            h = min(h, t_final - cur.t)
            check = False
        else:
            h = min(dt, t_final - cur.t)
            check = True
        before = cur
        with np.errstate(over="ignore", invalid="ignore"):
            cur, clips = step(
                cur, kernel, closure, h, op, rho_floor=rho_floor, check_cfl=check, cfl=cfl
            )
            clips_total += clips
            if tracers is not None:
                tracers.advect(before, cur, h)
        n_steps += 1

        finite = np.isfinite(cur.rho).all() and np.isfinite(cur.u).all()
        if finite and cur.p is not None:
            finite = np.isfinite(cur.p).all()
        if not finite:
            outcome = "nan"
            blowup_time = cur.t
            break
        if max_gradient_norm(cur) >= threshold:
            outcome = "blowup"
            blowup_time = cur.t
            records.append(diag(cur))
            break
        if cur.t >= next_record - 1e-12:
            records.append(diag(cur))
            while next_record <= cur.t + 1e-12:
                next_record += record_dt
        if snapshots is not None and cur.t >= next_snapshot - 1e-12:
            snapshots.append(cur.copy())
            while next_snapshot <= cur.t + 1e-12:
                next_snapshot += snapshot_dt

    if outcome == "completed" and (not records or records[-1]["t"] < cur.t - 1e-12):
        records.append(diag(cur))
    if snapshots is not None and outcome == "completed" and snapshots[-1].t < cur.t - 1e-12:
        snapshots.append(cur.copy())
    return EulerRunResult(
        cur, records, outcome, n_steps, blowup_time, snapshots, clips_total, threshold
    )


# --- NSA entropy balance --------------------------------------------------------


def nsa_entropy_balance_residual(
    snapshots: List[FieldState], kernel: Kernel, closure: NSA
) -> dict:
    """Integrated defect of the entropy balance on a sequence of snapshots.

    For the 1D NSA closure the quantity -rho S satisfies

        (-rho S)_t + ( -rho u S + (sigma2/C_v) (ln T)_x )_x
            = 2 tau rho_bar rho - (sigma1/C_v) u_x^2 / T - (sigma2/C_v) (T_x / T)^2

    exactly in the continuum. Snapshots must be uniformly spaced in time; the
    time derivative is centered, so the residual is reported on interior
    snapshots. Returns {"times": [...], "residuals": [...], "mean": float}
    where each residual is the L1 norm of the defect over the domain.
    """
    if not isinstance(closure, NSA):
        raise ValidationError("entropy balance residual applies to the NSA closure")
    if len(snapshots) < 3:
        raise ValidationError("need at least three uniformly spaced snapshots")
    times = np.array([s.t for s in snapshots])
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-6, atol=1e-12):
        raise ValidationError("snapshots must be uniformly spaced in time")
    grid = snapshots[0].grid
    if grid.dim != 1:
        raise ValidationError("the NSA closure is 1D only")
    h = grid.dx[0]
    dt_rec = float(dts[0])
    gamma = closure.gamma(1)
    op = NonlocalOperator(kernel, grid)

    def neg_rho_s(s: FieldState) -> np.ndarray:
        return -s.rho * (np.log(s.p) - gamma * np.log(s.rho))

    residuals = []
    for k in range(1, len(snapshots) - 1):
        s = snapshots[k]
        d_dt = (neg_rho_s(snapshots[k + 1]) - neg_rho_s(snapshots[k - 1])) / (2.0 * dt_rec)
        temp = s.p / ((gamma - 1.0) * closure.c_v * s.rho)
        u0 = s.u[..., 0]
        flux = -s.rho * u0 * (np.log(s.p) - gamma * np.log(s.rho))
        flux = flux + (closure.sigma2 / closure.c_v) * _central(np.log(temp), h, 0)
        ux = _central(u0, h, 0)
        tx = _central(temp, h, 0)
        rho_bar = op.apply(s.rho, rho=s.rho)
        rhs = (
            2.0 * kernel.tau * rho_bar * s.rho
            - (closure.sigma1 / closure.c_v) * ux * ux / temp
            - (closure.sigma2 / closure.c_v) * (tx / temp) ** 2
        )
        defect = d_dt + _central(flux, h, 0) - rhs
        residuals.append(float(np.abs(defect).sum() * h))
    return {
        "times": [float(t) for t in times[1:-1]],
        "residuals": residuals,
        "mean": float(np.mean(residuals)),
    }
