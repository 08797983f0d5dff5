"""Certified bounds on subset-summed distance to biseparable states."""
from .errors import CapacityError, UnsupportedError, ValidationError
from .kmeasure import (
    KReport,
    delta_bounds,
    k_grid_lower,
    k_measure,
    k_paper_w_formula,
    k_w_lower,
)
from .qsys import Bipartition, DensityMatrix, SystemLayout
from .sepdist import BoundInterval, SolverConfig, ppt_distance

__all__ = [
    "Bipartition",
    "BoundInterval",
    "CapacityError",
    "DensityMatrix",
    "KReport",
    "SolverConfig",
    "SystemLayout",
    "UnsupportedError",
    "ValidationError",
    "delta_bounds",
    "k_grid_lower",
    "k_measure",
    "k_paper_w_formula",
    "k_w_lower",
    "ppt_distance",
]
