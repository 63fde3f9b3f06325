"""Numerical laboratory for orthogonal projections of self-similar measures."""

from .curve import SmoothCurve, frenet_frame, nondegeneracy_check, one_param_curve, osculating_plane, reversed_curve
from .dimension import DimensionEstimate, ScaleLadder, box_count_dimension, entropy, entropy_dimension, smoothed_entropy
from .experiments import run_scenario
from .grassmann import KPlane, plane_distance, project, span_plane
from .group import GeneratorSet, cyclic_vector_check, orbit_line_span, random_element, sample_group
from .ifs import PointCloud, SimilarityMap, WeightedIFS, coding_map, cut_set, sample_measure, similarity_dimension, validate

__version__ = "0.1.0"

__all__ = [
    "DimensionEstimate",
    "GeneratorSet",
    "KPlane",
    "PointCloud",
    "ScaleLadder",
    "SimilarityMap",
    "SmoothCurve",
    "WeightedIFS",
    "box_count_dimension",
    "coding_map",
    "cut_set",
    "cyclic_vector_check",
    "entropy",
    "entropy_dimension",
    "frenet_frame",
    "nondegeneracy_check",
    "one_param_curve",
    "orbit_line_span",
    "osculating_plane",
    "plane_distance",
    "project",
    "random_element",
    "reversed_curve",
    "run_scenario",
    "sample_group",
    "sample_measure",
    "similarity_dimension",
    "smoothed_entropy",
    "span_plane",
    "validate",
]
