"""Boundary-integral Laplace solver for equipotential inclusions in a bounded domain."""
from .analysis import (
    GRADIENT_RULE,
    GradientMax,
    REstimate,
    boundary_flux,
    dirichlet_energy,
    estimate_R_o,
    extrapolate_flux,
    gradient_samples,
    max_gradient,
    outer_budget,
    variational_bounds,
)
from .bie import (
    FieldSolution,
    LayerOperator,
    solve_capacitance,
    solve_fixed_potentials,
    solve_floating,
    solve_single_floating,
)
from .boundary_data import BoundaryData
from .discretization import (
    MAX_LEVEL,
    BoundaryDiscretization,
    Curve,
    discretize,
    min_resolvable_delta,
)

__all__ = [
    "BoundaryData", "BoundaryDiscretization", "Curve", "FieldSolution", "GRADIENT_RULE",
    "GradientMax", "LayerOperator", "MAX_LEVEL", "REstimate", "boundary_flux", "dirichlet_energy",
    "discretize", "estimate_R_o", "extrapolate_flux", "gradient_samples", "max_gradient",
    "min_resolvable_delta", "outer_budget", "solve_capacitance", "solve_fixed_potentials",
    "solve_floating", "solve_single_floating", "variational_bounds",
]
