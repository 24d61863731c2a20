"""Toom-Cook convolution transforms, floating-point error measurement, and
analytic worst-case bounds."""

from .engine import (
    ConvConfig,
    conv_1d,
    conv_1d_exact,
    conv_2d,
    conv_2d_exact,
    conv_direct,
    conv_direct_exact,
    dot_with_order,
    huffman_order,
    pairwise_sum,
)
from .exact import INFINITY, Point, Polynomial, parse_points, poly_product, to_nearest_float
from .harness import ErrorReport, SearchState, measure_error, reproduce_table, search_points
from .transforms import (
    MultCount,
    TransformSet,
    build_modified,
    build_toom_cook,
    build_transforms,
    chebyshev_points,
    mult_count,
    read_transform_json,
)

__version__ = "0.1.0"
