"""Punctured-torus groups in the Maskit slice, Koebe families and circle chains."""

from .moebius import (INF, Mobius, GeneralizedDisk, LOWER_HALF_PLANE, classify, compose,
                      fixed_points, inverse, map_disk, three_point_map)
from .farey import Frac, FareyWord, word, evaluate, is_neighbor, farey_parents, oz_compose

__all__ = [
    "INF", "Mobius", "GeneralizedDisk", "LOWER_HALF_PLANE", "classify", "compose",
    "fixed_points", "inverse", "map_disk", "three_point_map",
    "Frac", "FareyWord", "word", "evaluate", "is_neighbor", "farey_parents", "oz_compose",
]
