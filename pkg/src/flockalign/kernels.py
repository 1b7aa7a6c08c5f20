"""Pairwise communication kernels and their envelope bounds.

A kernel is a small frozen dataclass; everything else is a module function
dispatching on the variant:

* ``eval_kernel`` -- pointwise values phi(x, y),
* ``pair_matrix`` -- the dense N x N weight matrix for agent systems,
* ``kernel_bounds`` -- sup phi, sup |grad_x phi| and sup |(grad_x + grad_y) phi|,
* ``kernel_floor`` -- min of a radial kernel over distances up to r,
* ``truncate_kernel`` -- the flat-floor modification max(phi, floor).

Radial kernels depend on positions only through ||x - y||, which makes them
exactly symmetric in floating point (the distance is computed from squared
differences, identical under argument swap). The topological variant weighs
the radial factor by a non-increasing function of the mass sitting between
the two points, so it needs a mass oracle at evaluation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import ValidationError

__all__ = [
    "Constant",
    "MetricProfile",
    "ParetoTail",
    "CompactSupport",
    "Topological1D",
    "Truncated",
    "CustomRadial",
    "KernelBounds",
    "eval_kernel",
    "pair_matrix",
    "kernel_bounds",
    "kernel_floor",
    "truncate_kernel",
]


@dataclass(frozen=True)
class KernelBounds:
    """Envelope constants consumed by certification.

    ``phi_plus`` bounds the kernel from above, ``grad_x_sup`` bounds the
    gradient in one argument, ``sym_grad_sup`` bounds the symmetrized
    gradient (zero for any radial kernel, where the two gradients cancel).
    ``approximate`` marks bounds obtained by a finite-difference scan rather
    than a closed form; certification refuses such bounds unless explicitly
    allowed.
    """

    phi_plus: float
    grad_x_sup: float
    sym_grad_sup: float
    approximate: bool = False


def _check_tau(tau: float) -> None:
    if not (isinstance(tau, (int, float)) and math.isfinite(tau) and tau >= 0):
        raise ValidationError(f"alignment strength tau must be finite and >= 0, got {tau!r}")


def _check_positive(value: float, name: str) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class Constant:
    """phi(x, y) = phi0 everywhere."""

    phi0: float
    tau: float = 1.0

    def __post_init__(self):
        _check_positive(self.phi0, "phi0")
        _check_tau(self.tau)

    def profile(self, r):
        return np.full(np.shape(r), float(self.phi0))


@dataclass(frozen=True)
class MetricProfile:
    """Radial kernel with a named smooth profile.

    ``bracket_power``: phi(r) = scale * (1 + r^2)^(-power/2)
    ``gaussian``:      phi(r) = scale * exp(-r^2 / (2 width^2))
    """

    shape: str = "bracket_power"
    scale: float = 1.0
    power: float = 1.0
    width: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if self.shape not in ("bracket_power", "gaussian"):
            raise ValidationError(
                f"unknown metric profile {self.shape!r}; expected 'bracket_power' or 'gaussian'"
            )
        _check_positive(self.scale, "scale")
        if self.shape == "bracket_power":
            _check_positive(self.power, "power")
        else:
            _check_positive(self.width, "width")
        _check_tau(self.tau)

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        if self.shape == "bracket_power":
            return self.scale * (1.0 + r * r) ** (-0.5 * self.power)
        return self.scale * np.exp(-(r * r) / (2.0 * self.width**2))


@dataclass(frozen=True)
class ParetoTail:
    """Fat-tailed radial kernel phi(r) = c * (1 + r^2)^(-theta/2), theta in (0, 1).

    The sub-unit exponent keeps the tail non-integrable, which is what makes
    unconditional flocking estimates possible; theta outside (0, 1) is rejected.
    """

    c: float
    theta: float
    tau: float = 1.0

    def __post_init__(self):
        _check_positive(self.c, "c")
        if not (isinstance(self.theta, (int, float)) and 0.0 < self.theta < 1.0):
            raise ValidationError(f"theta must lie in (0, 1), got {self.theta!r}")
        _check_tau(self.tau)

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        return self.c * (1.0 + r * r) ** (-0.5 * self.theta)


@dataclass(frozen=True)
class CompactSupport:
    """C^1 bump phi(r) = scale * (1 - (r/radius)^2)^2 inside its radius, 0 outside."""

    radius: float
    scale: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        _check_positive(self.radius, "radius")
        _check_positive(self.scale, "scale")
        _check_tau(self.tau)

    def profile(self, r):
        s = np.asarray(r, dtype=float) / self.radius
        q = np.clip(1.0 - s * s, 0.0, None)
        return self.scale * q * q


@dataclass(frozen=True)
class CustomRadial:
    """User-supplied radial profile.

    Bounds must either be declared or are estimated by a finite-difference
    scan and flagged ``approximate``; certification rejects the flagged kind
    unless told otherwise. The profile is assumed non-increasing.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    tau: float = 1.0
    declared_bounds: Optional[KernelBounds] = None

    def __post_init__(self):
        if not callable(self.fn):
            raise ValidationError("CustomRadial.fn must be callable")
        _check_tau(self.tau)

    def profile(self, r):
        return np.asarray(self.fn(np.asarray(r, dtype=float)), dtype=float)


@dataclass(frozen=True)
class Truncated:
    """Flat-floor modification phi_floor(r) = max(phi(r), floor) of a radial kernel.

    Wherever the base kernel exceeds the floor the value is the base value,
    bit for bit, which is what makes truncation-equivalence arguments exact.
    """

    base: "RadialKernel"
    floor: float

    def __post_init__(self):
        if isinstance(self.base, Topological1D):
            raise ValidationError("cannot truncate a topological kernel (not radial)")
        if not hasattr(self.base, "profile"):
            raise ValidationError(f"cannot truncate {type(self.base).__name__}")
        if not (isinstance(self.floor, (int, float)) and math.isfinite(self.floor) and self.floor > 0):
            raise ValidationError(f"truncation floor must be finite and > 0, got {self.floor!r}")
        sup = float(np.max(self.base.profile(0.0)))
        if self.floor > sup:
            raise ValidationError(
                f"truncation floor {self.floor} exceeds the kernel sup {sup}"
            )

    @property
    def tau(self) -> float:
        return self.base.tau

    def profile(self, r):
        return np.maximum(self.base.profile(r), self.floor)


@dataclass(frozen=True)
class Topological1D:
    """1D kernel phi(x, y) = radial(|x - y|) * mass_profile(mass between x and y).

    ``mass_profile(d) = mass_scale * (1 + d^2)^(-mass_power/2)`` is non-increasing,
    so crowded interludes weaken the coupling. Evaluation needs a callable
    reporting the mass between two points; agents use empirical counts and
    grids integrate the density over the connecting arc.
    """

    radial: "RadialKernel"
    mass_power: float = 1.0
    mass_scale: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if isinstance(self.radial, Topological1D) or not hasattr(self.radial, "profile"):
            raise ValidationError("Topological1D.radial must be a radial kernel")
        _check_positive(self.mass_power, "mass_power")
        _check_positive(self.mass_scale, "mass_scale")
        _check_tau(self.tau)

    def mass_profile(self, d):
        d = np.asarray(d, dtype=float)
        return self.mass_scale * (1.0 + d * d) ** (-0.5 * self.mass_power)


RadialKernel = Union[Constant, MetricProfile, ParetoTail, CompactSupport, CustomRadial, Truncated]
Kernel = Union[RadialKernel, Topological1D]


def _as_points(x) -> np.ndarray:
    """Coerce input to an array whose last axis is the coordinate axis."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1)
    return x


def _pair_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = x - y
    return np.sqrt(np.sum(d * d, axis=-1))


def eval_kernel(kernel: Kernel, x, y, mass_between: Optional[Callable] = None):
    """Evaluate phi(x, y) pointwise.

    ``x`` and ``y`` are arrays whose last axis indexes coordinates (scalars
    are treated as points on the line); shapes must broadcast. Topological
    kernels additionally need ``mass_between(lo, hi)`` returning the mass of
    the segment [lo, hi] and only accept 1D points.
    """
    x = _as_points(x)
    y = _as_points(y)
    if isinstance(kernel, Topological1D):
        if x.shape[-1] != 1 or y.shape[-1] != 1:
            raise ValidationError("topological kernel is defined for 1D points only")
        if mass_between is None:
            raise ValidationError(
                "topological kernel needs a mass_between(lo, hi) callable"
            )
        xs, ys = x[..., 0], y[..., 0]
        lo = np.minimum(xs, ys)
        hi = np.maximum(xs, ys)
        d = np.asarray(mass_between(lo, hi), dtype=float)
        if np.any(d < -1e-14):
            raise ValidationError("mass_between returned a negative mass")
        return kernel.radial.profile(np.abs(xs - ys)) * kernel.mass_profile(d)
    return kernel.profile(_pair_distance(x, y))


def _empirical_mass_matrix(positions: np.ndarray) -> np.ndarray:
    """Fraction of agents strictly between each pair of 1D positions."""
    xs = positions[:, 0]
    order = np.sort(xs)
    n = xs.size
    lo = np.minimum.outer(xs, xs)
    hi = np.maximum.outer(xs, xs)
    inside = np.searchsorted(order, hi.ravel(), side="left") - np.searchsorted(
        order, lo.ravel(), side="right"
    )
    return np.maximum(inside.reshape(n, n), 0) / n


def pair_matrix(kernel: Kernel, positions) -> np.ndarray:
    """Dense symmetric weight matrix W[i, j] = phi(x_i, x_j) for agent positions (N, d)."""
    pos = np.asarray(positions, dtype=float)
    if pos.ndim == 1:
        pos = pos[:, None]
    if isinstance(kernel, Topological1D):
        if pos.shape[1] != 1:
            raise ValidationError("topological kernel is defined for 1D points only")
        dmat = _empirical_mass_matrix(pos)
        r = np.abs(pos[:, 0, None] - pos[None, :, 0])
        return kernel.radial.profile(r) * kernel.mass_profile(dmat)
    diff = pos[:, None, :] - pos[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    return kernel.profile(r)


# Max of |d/dr (1 + r^2)^(-s/2)| over r >= 0, attained at r = 1/sqrt(s + 1):
#   s * (s+1)^(-1/2) * ((s+2)/(s+1))^(-(s+2)/2)
def _bracket_grad_max(s: float) -> float:
    return s / math.sqrt(s + 1.0) * ((s + 2.0) / (s + 1.0)) ** (-0.5 * (s + 2.0))


_SCAN_RMAX = 50.0
_SCAN_POINTS = 200_001


def _scan_bounds(profile: Callable[[np.ndarray], np.ndarray]) -> KernelBounds:
    r = np.linspace(0.0, _SCAN_RMAX, _SCAN_POINTS)
    v = np.asarray(profile(r), dtype=float)
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise ValidationError("custom profile must be finite and non-negative on [0, 50]")
    slopes = np.abs(np.diff(v)) / (r[1] - r[0])
    # 10% headroom over the steepest sampled chord; flagged approximate anyway.
    return KernelBounds(
        phi_plus=float(v.max()),
        grad_x_sup=float(slopes.max()) * 1.1,
        sym_grad_sup=0.0,
        approximate=True,
    )


def kernel_bounds(kernel: Kernel, rho_sup: Optional[float] = None) -> KernelBounds:
    """Envelope bounds for a kernel.

    Radial kernels have closed-form bounds and exactly cancelling symmetric
    gradients. Topological kernels need ``rho_sup`` (a sup of the density the
    mass distance is measured against); their bounds are rigorous given it.
    """
    if isinstance(kernel, Constant):
        return KernelBounds(float(kernel.phi0), 0.0, 0.0)
    if isinstance(kernel, MetricProfile):
        if kernel.shape == "bracket_power":
            g = kernel.scale * _bracket_grad_max(kernel.power)
        else:
            g = kernel.scale * math.exp(-0.5) / kernel.width
        return KernelBounds(float(kernel.scale), float(g), 0.0)
    if isinstance(kernel, ParetoTail):
        return KernelBounds(float(kernel.c), float(kernel.c * _bracket_grad_max(kernel.theta)), 0.0)
    if isinstance(kernel, CompactSupport):
        g = 8.0 * kernel.scale / (3.0 * math.sqrt(3.0) * kernel.radius)
        return KernelBounds(float(kernel.scale), float(g), 0.0)
    if isinstance(kernel, Truncated):
        b = kernel_bounds(kernel.base)
        # The floor flattens, never steepens: gradient bounds carry over.
        return KernelBounds(b.phi_plus, b.grad_x_sup, b.sym_grad_sup, b.approximate)
    if isinstance(kernel, CustomRadial):
        if kernel.declared_bounds is not None:
            return kernel.declared_bounds
        return _scan_bounds(kernel.profile)
    if isinstance(kernel, Topological1D):
        if rho_sup is None:
            raise ValidationError(
                "bounds for a topological kernel need rho_sup, the sup of the density"
            )
        if not (math.isfinite(rho_sup) and rho_sup >= 0):
            raise ValidationError(f"rho_sup must be finite and >= 0, got {rho_sup!r}")
        rb = kernel_bounds(kernel.radial)
        m_plus = kernel.mass_scale
        m_grad = kernel.mass_scale * _bracket_grad_max(kernel.mass_power)
        # d/dx of the mass distance is bounded by the density sup; the radial
        # factor contributes through the chain rule.
        grad_x = rb.grad_x_sup * m_plus + rb.phi_plus * m_grad * rho_sup
        # The symmetric derivative of |x - y| cancels, so only the mass factor
        # survives: |(d/dx + d/dy) d_mass| = |rho(y) - rho(x)| <= rho_sup.
        sym = rb.phi_plus * m_grad * rho_sup + rb.sym_grad_sup * m_plus
        return KernelBounds(rb.phi_plus * m_plus, grad_x, sym, rb.approximate)
    raise ValidationError(f"unknown kernel type {type(kernel).__name__}")


def kernel_floor(kernel: RadialKernel, r: float) -> float:
    """Minimum of a radial kernel over pair distances in [0, r].

    Built-in profiles are non-increasing, so this is the value at r; custom
    profiles are scanned.
    """
    if isinstance(kernel, Topological1D):
        raise ValidationError("kernel_floor is defined for radial kernels only")
    if not (math.isfinite(r) and r >= 0):
        raise ValidationError(f"r must be finite and >= 0, got {r!r}")
    if isinstance(kernel, CustomRadial):
        grid = np.linspace(0.0, r, 4097) if r > 0 else np.zeros(1)
        return float(np.min(kernel.profile(grid)))
    return float(np.min(kernel.profile(np.asarray(r))))


def truncate_kernel(kernel: RadialKernel, floor: float) -> Truncated:
    """Flat-floor modification max(phi, floor); floor must sit in (0, sup phi]."""
    return Truncated(base=kernel, floor=float(floor))
