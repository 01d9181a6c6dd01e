"""Contact maps, horizontal surface geometry and surface-family moduli on the
Heisenberg group, with numerical checks for the radial stretch map."""

from .heis import Point, gauge, group_mul
from .logchart import LogPoint, phi, phi_inv
from .maps import ContactMap, beltrami, contact_residuals
from .modulus import (SphericalRing, cone_density, cone_foliation, mean_distortion_2,
                      mean_distortion_23, modulus_foliation, modulus_pushforward,
                      verify_main_theorem)
from .registry import make_map
from .stretch import stretch_map

__version__ = "0.1.0"

__all__ = [
    "ContactMap", "LogPoint", "Point", "SphericalRing", "beltrami", "cone_density",
    "cone_foliation", "contact_residuals", "gauge", "group_mul", "make_map",
    "mean_distortion_2", "mean_distortion_23", "modulus_foliation", "modulus_pushforward",
    "phi", "phi_inv", "stretch_map", "verify_main_theorem",
]
