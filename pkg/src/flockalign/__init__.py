"""Alignment dynamics toolkit.

Simulation of velocity-alignment models at three scales (interacting agents,
nonlocal Euler alignment PDEs in 1D/2D, and a 1D kinetic Fokker-Planck
equation) plus certification of threshold and flocking bounds from initial
data, behind one CLI with delimited outputs.
"""

__version__ = "0.1.0"

from .agents import (
    AgentRunResult,
    AgentState,
    agent_diagnostics,
    cs_acceleration,
    integrate_agents,
    truncation_radius,
)
from .errors import (
    CflError,
    ConfigError,
    NumericsError,
    ValidationError,
    VacuumError,
)
from .euler_grid import (
    NSA,
    EulerRunResult,
    FieldState,
    Grid,
    Isentropic,
    MonoKinetic,
    NonlocalOperator,
    TracerSet,
    admissible_dt,
    entropy_field,
    euler_diagnostics,
    max_gradient_norm,
    nsa_entropy_balance_residual,
    pde_rhs,
    run_euler,
    step,
    sym_gradient_spectrum,
)
from .kernels import (
    CompactSupport,
    Constant,
    CustomRadial,
    KernelBounds,
    MetricProfile,
    ParetoTail,
    Topological1D,
    Truncated,
    eval_kernel,
    kernel_bounds,
    kernel_floor,
    pair_matrix,
    truncate_kernel,
)
from .kinetic import (
    KineticRunResult,
    PhaseGrid,
    PhaseState,
    collision_term,
    drift_field,
    h_balance,
    h_functional,
    kinetic_diagnostics,
    moments,
    run_kinetic,
)
from .thresholds import (
    MonitorResult,
    ThresholdReport,
    certify,
    energy_fluctuation,
    flocking_predictions,
    monitor,
)

__all__ = [
    "__version__",
    "AgentRunResult",
    "AgentState",
    "agent_diagnostics",
    "cs_acceleration",
    "integrate_agents",
    "truncation_radius",
    "CflError",
    "ConfigError",
    "NumericsError",
    "ValidationError",
    "VacuumError",
    "NSA",
    "EulerRunResult",
    "FieldState",
    "Grid",
    "Isentropic",
    "MonoKinetic",
    "NonlocalOperator",
    "TracerSet",
    "admissible_dt",
    "entropy_field",
    "euler_diagnostics",
    "max_gradient_norm",
    "nsa_entropy_balance_residual",
    "pde_rhs",
    "run_euler",
    "step",
    "sym_gradient_spectrum",
    "CompactSupport",
    "Constant",
    "CustomRadial",
    "KernelBounds",
    "MetricProfile",
    "ParetoTail",
    "Topological1D",
    "Truncated",
    "eval_kernel",
    "kernel_bounds",
    "kernel_floor",
    "pair_matrix",
    "truncate_kernel",
    "KineticRunResult",
    "PhaseGrid",
    "PhaseState",
    "collision_term",
    "drift_field",
    "h_balance",
    "h_functional",
    "kinetic_diagnostics",
    "moments",
    "run_kinetic",
    "MonitorResult",
    "ThresholdReport",
    "certify",
    "energy_fluctuation",
    "flocking_predictions",
    "monitor",
]
