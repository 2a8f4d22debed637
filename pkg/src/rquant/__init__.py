"""Optimal quantization of the self-similar measure on the R-triangle."""

from .algebra import PointQ, QuadNum, point, quad_cmp, to_float
from .optimal import (
    Alpha2Variant,
    OptimalSetSpec,
    canonical_spec,
    count_optimal_sets,
    ell,
    enumerate_optimal_sets,
    optimal_set,
    quantization_error,
)

__version__ = "0.1.0"

__all__ = [
    "Alpha2Variant",
    "OptimalSetSpec",
    "PointQ",
    "QuadNum",
    "canonical_spec",
    "count_optimal_sets",
    "ell",
    "enumerate_optimal_sets",
    "optimal_set",
    "point",
    "quad_cmp",
    "quantization_error",
    "to_float",
]
