"""mmWave coverage with random blockages and reflectors.

Two engines over the same system model: numerical evaluation of the
analytic distance/coverage laws, and an exact-geometry Monte Carlo
simulator, cross-validated against each other.
"""

__version__ = "0.1.0"

from .sampling import NetworkParams, ObjectSegment, derive_beta  # noqa: F401
from .quadrature import QuadratureSpec  # noqa: F401
