"""Variational gap bounds for interface states of the XXZ ferromagnet on cylinders."""

__version__ = "0.1.0"

from .domains import Disk, Interval, Polygon, Rectangle, Square, parse_shape
from .exceptions import (CertificationError, ConvergenceError, EmptyRegionError,
                         InvalidParameter, XXZError)
from .lattice import build_base, build_cylinder, build_stick, chain, chain_of, make_cylinder
from .states import AnisotropyParams, InterfaceSpec, interface, make_aniso

__all__ = [
    "AnisotropyParams", "CertificationError", "ConvergenceError", "Disk", "EmptyRegionError",
    "Interval", "InterfaceSpec", "InvalidParameter", "Polygon", "Rectangle", "Square",
    "XXZError", "build_base", "build_cylinder", "build_stick", "chain", "chain_of", "interface",
    "make_aniso", "make_cylinder", "parse_shape",
]
