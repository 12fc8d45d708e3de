"""Towers of interacting bubbles on a pierced four-dimensional ball.

Builds multi-scale bubble ansatz profiles for competitive cubic systems on
the annulus, evaluates the reduced rate functional and its minimizer, solves
the radial system by damped Newton on a graded mesh, and checks the scaling
laws the construction rests on.
"""

__version__ = "0.1.0"

from .bubbles import (
    Bubble,
    Partition,
    PartitionError,
    ProjectedBubble,
    TowerConfig,
    project_bubble,
    project_dbubble,
    rate_schedule,
    validate_partition,
)
from .constants import UniversalConstants, compute_constants, robin_center
from .mesh import GradedMesh, build_mesh
from .quadrature import h1_norm, integrate_radial, lp_norm
from .reduced import (
    PsiCoefficients,
    expansion_check,
    minimizer_closed_form,
    optimal_rates,
    psi_eval,
    psi_grad,
    psi_minimize_numeric,
    reduced_energy_eval,
    theorem_rates,
)
from .solver import (
    ContinuationError,
    ConvergenceError,
    NewtonOptions,
    PositivityError,
    RateFitError,
    SystemState,
    ansatz_state,
    continuation_sweep,
    corrector_norm,
    extract_rates,
    newton_solve,
    projected_linearization_sigma_min,
)
from .config import RunConfig, dump_config, load_config, parse_config, save_config

__all__ = [
    "Bubble",
    "ContinuationError",
    "ConvergenceError",
    "GradedMesh",
    "NewtonOptions",
    "Partition",
    "PartitionError",
    "PositivityError",
    "ProjectedBubble",
    "PsiCoefficients",
    "RateFitError",
    "RunConfig",
    "SystemState",
    "TowerConfig",
    "UniversalConstants",
    "__version__",
    "ansatz_state",
    "build_mesh",
    "compute_constants",
    "continuation_sweep",
    "corrector_norm",
    "dump_config",
    "expansion_check",
    "extract_rates",
    "h1_norm",
    "integrate_radial",
    "load_config",
    "lp_norm",
    "minimizer_closed_form",
    "newton_solve",
    "optimal_rates",
    "parse_config",
    "project_bubble",
    "project_dbubble",
    "projected_linearization_sigma_min",
    "psi_eval",
    "psi_grad",
    "psi_minimize_numeric",
    "rate_schedule",
    "reduced_energy_eval",
    "robin_center",
    "save_config",
    "theorem_rates",
    "validate_partition",
]
