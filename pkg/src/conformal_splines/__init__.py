"""Conformally constrained discrete Willmore surfaces."""

from __future__ import annotations

from .conformal import (
    ConformalClass,
    conformal_rescale,
    cross_ratio_matrix,
    extended_cross_ratio,
    induced_metric,
    quasi_conformal_error,
    scale_factors,
)
from .diagnostics import (
    TubeInvariants,
    TubeSpec,
    conservation_report,
    flux_class,
    generate_tube,
    tube_invariants,
)
from .errors import ConformalSplineError
from .io import read_obj, read_scene, write_obj
from .mesh import SimplicialSurface, build_surface
from .solver import ConstraintSet, ScaleConstraint, SolverOptions, SolverState, newton_solve
from .willmore import willmore_energy, willmore_gradient

__version__ = "0.1.0"

__all__ = [
    "ConformalClass",
    "ConformalSplineError",
    "ConstraintSet",
    "ScaleConstraint",
    "SimplicialSurface",
    "SolverOptions",
    "SolverState",
    "TubeInvariants",
    "TubeSpec",
    "build_surface",
    "conformal_rescale",
    "conservation_report",
    "cross_ratio_matrix",
    "extended_cross_ratio",
    "flux_class",
    "generate_tube",
    "induced_metric",
    "newton_solve",
    "quasi_conformal_error",
    "read_obj",
    "read_scene",
    "scale_factors",
    "tube_invariants",
    "willmore_energy",
    "willmore_gradient",
    "write_obj",
]
