"""Sub-Riemannian geometry of the first Heisenberg group and stability of nearly isometric maps."""

from .geodesics import cc_distance, cc_norm, geodesic_point, solve_polar
from .group import Isometry, dilate, inverse, multiply

__version__ = "0.1.0"

__all__ = [
    "Isometry",
    "cc_distance",
    "cc_norm",
    "dilate",
    "geodesic_point",
    "inverse",
    "multiply",
    "solve_polar",
]
