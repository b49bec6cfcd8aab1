"""Polynomials, semialgebraic sets, and polynomial dynamical systems."""

from .parser import PolynomialSyntaxError, UnknownVariableError, parse_polynomial
from .polynomial import Polynomial, monomials_up_to, to_text
from .sampling import (SamplerConfig, Samples, bounding_box, grid_points, random_points,
                       region_overlap_witness, sample_basic_set, sample_region)
from .sets import (DEFAULT_NEGATION_GAP, BasicSet, Box, SemialgebraicRegion, intersect_boxes,
                   negate_inequality)
from .system import AugmentedSystem, DynamicalSystem, copy_name, self_compose

__all__ = [
    "AugmentedSystem", "BasicSet", "Box", "DEFAULT_NEGATION_GAP", "DynamicalSystem", "Polynomial",
    "PolynomialSyntaxError", "SamplerConfig", "Samples", "SemialgebraicRegion", "UnknownVariableError",
    "bounding_box", "copy_name", "grid_points", "intersect_boxes", "monomials_up_to", "negate_inequality",
    "parse_polynomial", "random_points", "region_overlap_witness", "sample_basic_set", "sample_region",
    "self_compose", "to_text",
]
