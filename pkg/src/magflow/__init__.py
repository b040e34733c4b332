"""Magnetic flows on a compact genus-two hyperbolic surface: helicity,
critical values, and the disk Radon transform."""

from .field import ConformalMetric, MagneticField, helicity_formula, helicity_integral, s_h_value
from .hyp import GeodesicCircle, HalfPlanePoint, Isometry, hyp_distance
from .surface import Bump, InvariantOneForm, InvariantScalar, default_group

__all__ = [
    "Bump",
    "ConformalMetric",
    "GeodesicCircle",
    "HalfPlanePoint",
    "InvariantOneForm",
    "InvariantScalar",
    "Isometry",
    "MagneticField",
    "default_group",
    "helicity_formula",
    "helicity_integral",
    "hyp_distance",
    "s_h_value",
]
