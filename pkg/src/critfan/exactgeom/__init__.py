"""Exact rational cones and fans."""
from .cone import Cone, Sign, dd_convert, faces, relint_sign
from .fan import Fan, StarFan, fan_from_hyperplanes, is_valid_fan, star_fan
from .partition import LabeledRegion, cone_partition, delta_max
from .refine import refinement_parent, stellar_refine_to_simplicial

__all__ = [
    "Cone",
    "Fan",
    "LabeledRegion",
    "Sign",
    "StarFan",
    "cone_partition",
    "dd_convert",
    "delta_max",
    "faces",
    "fan_from_hyperplanes",
    "is_valid_fan",
    "refinement_parent",
    "relint_sign",
    "star_fan",
    "stellar_refine_to_simplicial",
]
