"""Constructors for initial data.

Everything here is deterministic given its arguments (random presets take an
explicit ``numpy.random.Generator``), and grid-independent: profiles are
closed-form or fixed finite Fourier series evaluated at cell centers, so
refining the mesh samples the same function.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .agents import AgentState
from .errors import ValidationError
from .euler_grid import FieldState, Grid

__all__ = [
    "agent_two_body",
    "agent_cluster",
    "density_uniform",
    "density_cosine",
    "velocity_zero",
    "velocity_sine",
    "velocity_ramp",
    "velocity_taylor_green",
    "ramp_extreme_slopes",
    "pressure_uniform",
    "pressure_scaled_density",
    "maxwellian",
]


# --- agents -------------------------------------------------------------------


def agent_two_body(gap: float = 1.0, dv: float = 1.0, dim: int = 1) -> AgentState:
    """Two agents approaching head-on along the first axis."""
    x = np.zeros((2, dim))
    v = np.zeros((2, dim))
    x[0, 0], x[1, 0] = -gap / 2.0, gap / 2.0
    v[0, 0], v[1, 0] = -dv / 2.0, dv / 2.0
    return AgentState(x, v)


def agent_cluster(
    n: int,
    rng: np.random.Generator,
    dim: int = 2,
    x_scale: float = 1.0,
    v_scale: float = 1.0,
) -> AgentState:
    """Gaussian cloud with exactly zero mean position and velocity."""
    if n < 2:
        raise ValidationError("cluster preset needs at least 2 agents")
    x = x_scale * rng.standard_normal((n, dim))
    v = v_scale * rng.standard_normal((n, dim))
    return AgentState(x - x.mean(axis=0), v - v.mean(axis=0))


# --- grid fields ----------------------------------------------------------------


def _axis_mesh(grid: Grid, ax: int) -> np.ndarray:
    coords = grid.axis_coords(ax)
    if grid.dim == 1:
        return coords
    shape = [1, 1]
    shape[ax] = grid.shape[ax]
    tiled = coords.reshape(shape)
    return np.broadcast_to(tiled, grid.shape).copy()


def density_uniform(grid: Grid, mass: float = 1.0) -> np.ndarray:
    if mass <= 0:
        raise ValidationError(f"mass must be > 0, got {mass}")
    return np.full(grid.shape, mass / float(np.prod(grid.lengths)))


def density_cosine(grid: Grid, mass: float = 1.0, amplitude: float = 0.3, mode: int = 1) -> np.ndarray:
    """(mass/|domain|) (1 + amplitude cos(2 pi mode x / L)); |amplitude| < 1 keeps it positive."""
    if not (-1.0 < amplitude < 1.0):
        raise ValidationError(f"density amplitude must lie in (-1, 1), got {amplitude}")
    x = _axis_mesh(grid, 0)
    base = density_uniform(grid, mass)
    return base * (1.0 + amplitude * np.cos(2.0 * math.pi * mode * x / grid.lengths[0]))


def velocity_zero(grid: Grid) -> np.ndarray:
    return np.zeros(grid.shape + (grid.dim,))


def velocity_sine(
    grid: Grid,
    amplitude: float,
    mode: int = 1,
    component: int = 0,
    vary_axis: int = 0,
) -> np.ndarray:
    """u_component = amplitude sin(2 pi mode x_axis / L_axis), other components zero."""
    u = velocity_zero(grid)
    x = _axis_mesh(grid, vary_axis)
    u[..., component] = amplitude * np.sin(2.0 * math.pi * mode * x / grid.lengths[vary_axis])
    return u


def velocity_taylor_green(grid: Grid, amplitude: float = 1.0) -> np.ndarray:
    """Divergence-free 2D cellular field (sin x cos y, -cos x sin y) scaled to the box."""
    if grid.dim != 2:
        raise ValidationError("taylor_green velocity is 2D only")
    kx = 2.0 * math.pi / grid.lengths[0]
    ky = 2.0 * math.pi / grid.lengths[1]
    x = _axis_mesh(grid, 0)
    y = _axis_mesh(grid, 1)
    u = velocity_zero(grid)
    u[..., 0] = amplitude * np.sin(kx * x) * np.cos(ky * y)
    u[..., 1] = -amplitude * np.cos(kx * x) * np.sin(ky * y)
    return u


_RAMP_KMAX = 41  # odd harmonics 1..41 of the triangle wave


def _smoothed_triangle(theta: np.ndarray, smoothing: float) -> np.ndarray:
    """Unit triangle wave (peak 1 at theta = pi/2) mollified in Fourier space."""
    out = np.zeros_like(theta)
    for k in range(1, _RAMP_KMAX + 1, 2):
        sign = -1.0 if (k - 1) // 2 % 2 else 1.0
        out += sign * (8.0 / (math.pi**2 * k * k)) * math.exp(-0.5 * (k * smoothing) ** 2) * np.sin(k * theta)
    return out


def _triangle_min_slope(length: float, smoothing: float) -> float:
    theta = np.linspace(0.0, 2.0 * math.pi, 8193)
    vals = _smoothed_triangle(theta, smoothing)
    return float(np.min(np.diff(vals) / np.diff(theta))) * (2.0 * math.pi / length)


def velocity_ramp(grid: Grid, min_slope: float, smoothing: float = 0.12) -> np.ndarray:
    """Smooth periodic wave whose steepest descending slope is exactly min_slope.

    Rises over one half period and falls over the other; the amplitude is
    scaled so that min_x u'(x) = min_slope (a negative number). Used to set up
    runs at a prescribed distance from the critical threshold.
    """
    if grid.dim != 1:
        raise ValidationError("ramp velocity is 1D only")
    if min_slope >= 0:
        raise ValidationError(f"min_slope must be negative, got {min_slope}")
    unit_min = _triangle_min_slope(grid.lengths[0], smoothing)
    scale = min_slope / unit_min
    theta = 2.0 * math.pi * _axis_mesh(grid, 0) / grid.lengths[0]
    return (scale * _smoothed_triangle(theta, smoothing))[..., None]


def ramp_extreme_slopes(length: float, min_slope: float, smoothing: float = 0.12):
    """(steepest descent, steepest ascent) of the ramp profile; ascent is its mirror."""
    unit_min = _triangle_min_slope(length, smoothing)
    scale = min_slope / unit_min
    theta = np.linspace(0.0, 2.0 * math.pi, 8193)
    vals = scale * _smoothed_triangle(theta, smoothing)
    slopes = np.diff(vals) / np.diff(theta) * (2.0 * math.pi / length)
    return float(slopes.min()), float(slopes.max())


def pressure_uniform(grid: Grid, value: float) -> np.ndarray:
    if value < 0:
        raise ValidationError(f"pressure must be >= 0, got {value}")
    return np.full(grid.shape, float(value))


def pressure_scaled_density(rho: np.ndarray, coef: float, gamma: float) -> np.ndarray:
    """p = coef * rho^gamma (uniform specific entropy)."""
    if coef < 0:
        raise ValidationError(f"pressure coefficient must be >= 0, got {coef}")
    return coef * rho**gamma


# --- kinetic --------------------------------------------------------------------


def maxwellian(xs: np.ndarray, vs: np.ndarray, rho: np.ndarray, u, theta: float) -> np.ndarray:
    """Local Maxwellian f(x, v) = rho(x) exp(-(v - u(x))^2 / 2 theta) / sqrt(2 pi theta).

    ``u`` may be a scalar or an array over xs; returns shape (len(xs), len(vs)).
    """
    if theta <= 0:
        raise ValidationError(f"temperature must be > 0, got {theta}")
    u = np.broadcast_to(np.asarray(u, dtype=float), np.shape(xs))
    w = vs[None, :] - u[:, None]
    return rho[:, None] * np.exp(-0.5 * w * w / theta) / math.sqrt(2.0 * math.pi * theta)
