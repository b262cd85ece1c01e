"""Supersymmetric two-center Coulomb problems in the plane.

Modules
-------
specfun       Bessel, elliptic and Mathieu functions, log-domain quadrature.
geometry      Elliptic coordinates, metric data and the spinor frame matrix.
model         Superpotentials, potentials, supercharges and Hamiltonians.
groundstates  Zero modes, their norms and density grids.
spectrum      Quasi-exactly-solvable levels and bound states.
verify        Numerical self-checks.
cli           Command line front end.
"""

from .errors import (DegeneracyError, DivergenceError, DomainError, NumericalError,
                     SingularityError, TwoCenterError)
from .geometry import CartesianPoint, EllipticPoint
from .groundstates import GroundState, Grid, density_grid, ground_state
from .model import ModelParams, nondimensionalize
from .spectrum import BoundState, assemble_bound_state, spectrum_table

__version__ = "0.1.0"

__all__ = [
    "TwoCenterError",
    "DomainError",
    "SingularityError",
    "DegeneracyError",
    "NumericalError",
    "DivergenceError",
    "CartesianPoint",
    "EllipticPoint",
    "ModelParams",
    "nondimensionalize",
    "GroundState",
    "Grid",
    "ground_state",
    "density_grid",
    "BoundState",
    "assemble_bound_state",
    "spectrum_table",
]
