"""Toric eigenvalue solver for square Laurent polynomial systems.

Roots are returned in Cox coordinates of the toric variety given by the
Minkowski sum of the Newton polytopes, so solutions at infinity are kept.
"""

from .cox import CoxPolynomial, CoxRing, LaurentSystem, build_cox_ring, homogenize, pi_map
from .lattice import smith_normal_form
from .polytope import (
    DegeneratePolytopeError,
    LatticePolytope,
    Support,
    lattice_points,
    minkowski_sum,
    mixed_volume,
    newton_polytope,
    polytope_from_points,
)
from .solver import (
    BasisSelectionError,
    RegularityError,
    SolveOptions,
    SolveResult,
    Solution,
    SolverError,
    solve,
)
from .verify import hilbert_corank, lagrange_rank, moment_map, residual, residual_digits

__version__ = "0.1.0"

__all__ = [
    "BasisSelectionError",
    "CoxPolynomial",
    "CoxRing",
    "DegeneratePolytopeError",
    "LatticePolytope",
    "LaurentSystem",
    "RegularityError",
    "Solution",
    "SolveOptions",
    "SolveResult",
    "SolverError",
    "Support",
    "build_cox_ring",
    "hilbert_corank",
    "homogenize",
    "lagrange_rank",
    "lattice_points",
    "minkowski_sum",
    "mixed_volume",
    "moment_map",
    "newton_polytope",
    "pi_map",
    "polytope_from_points",
    "residual",
    "residual_digits",
    "smith_normal_form",
    "solve",
]
