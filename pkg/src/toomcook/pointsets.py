"""Curated interpolation point sets and reference error values.

Two families are bundled: the fp32-tuned sets ("fp32" table) and the sets
tuned for fp64 transforms with fp32 Hadamard stage ("mixed" table), each for
1D and 2D kernels of size 3.  The stored point order is the accretion order
the sets were discovered in; it is also the fixed referent of the
"stored-order linear evaluation" baseline.  All n below count the infinity
pseudo-point; outputs are n_o = n - 2.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

from .exact import Point, parse_points
from .transforms import TransformSet, build_transforms

KERNEL_SIZE = 3

_P4 = "0,-1,1"
_P8 = _P4 + ",1/2,-1/2,2,-2"
_P10 = _P8 + ",-1/4,4"
_P14 = _P10 + ",1/4,-3/4,4/3,-4"

# fp32-tuned sets (1D); n=15 drops 0 from P14 and adds the {2/3,-3/2} pair
_FP32_1D = {
    4: _P4,
    5: _P4 + ",1/2",
    6: _P4 + ",1/2,-3",
    7: _P4 + ",1/2,-1/2,-3",
    8: _P8,
    9: _P8 + ",-1/4",
    10: _P10,
    11: _P10 + ",1/4",
    12: _P10 + ",3/4,-4/3",
    13: _P10 + ",3/4,-4/3,1/4",
    14: _P14,
    15: "-1,1,1/2,-1/2,2,-2,-1/4,4,1/4,-3/4,4/3,-4,2/3,-3/2",
    16: _P14 + ",2/3,-3/2",
    17: _P14 + ",2/3,-3/2,-2/3",
    18: _P14 + ",2/3,-3/2,-2/3,3/2",
}

# fp32-tuned sets (2D)
_FP32_2D = {
    4: _P4,
    5: _P4 + ",1/2",
    6: _P4 + ",1/2,-2",
    7: _P4 + ",1/2,-2,-1/2",
    8: _P8,
    9: _P8 + ",-1/4",
    10: _P10,
    11: "-1,1,1/2,-1/2,2,-2,-1/4,4,3/4,-4/3",
    12: _P10 + ",3/4,-4/3",
    13: _P10 + ",3/4,-4/3,1/4",
    14: _P14,
    15: "-1,1,1/2,-1/2,2,-2,-1/4,4,1/4,-3/4,4/3,-4,3/4,-4/3",
    16: _P14 + ",3/4,-4/3",
    17: _P14 + ",2/3,-3/2,3/2",
    18: _P14 + ",2/3,-3/2,-2/3,3/2",
}

# sets tuned for the mixed-precision pipeline
_P12M = _P10 + ",3/4,-4/3"
_P14M = _P12M + ",1/4,-4"
_P16M = _P14M + ",2/3,-3/2"
_P16M2 = _P14M + ",-3/4,4/3"

# Rows 15..18 build on the same P14 family as the fp32 table (the published
# mixed errors match those sets, not the P12-based P14 of row 14).
_MIXED_1D = {
    4: _P4,
    5: _P4 + ",3",
    6: _P4 + ",3,-1/2",
    7: _P4 + ",3,-1/2,1/2",
    8: _P8,
    9: _P8 + ",-1/4",
    10: _P10,
    11: _P10 + ",1/4",
    12: _P12M,
    13: _P12M + ",1/4",
    14: _P14M,
    15: "-1,1,1/2,-1/2,2,-2,-1/4,4,1/4,-3/4,4/3,-4,2/3,-3/2",
    16: _P14 + ",2/3,-3/2",
    17: _P14 + ",2/3,-3/2,-2/3",
    18: _P14 + ",2/3,-3/2,-2/3,3/2",
}

_MIXED_2D = {
    4: _P4,
    5: _P4 + ",3",
    6: _P4 + ",3,-1/2",
    7: _P4 + ",3,-1/2,1/2",
    8: _P8,
    9: _P8 + ",4",
    10: _P10,
    11: "-1,1,1/2,-1/2,2,-2,-1/4,4,3/4,-4/3",
    12: _P12M,
    13: _P12M + ",-4",
    14: _P14M,
    15: "-1,1,1/2,-1/2,2,-2,-1/4,4,3/4,-4/3,1/4,-4,-3/4,4/3",
    16: _P16M2,
    17: _P16M2 + ",3/2",
    18: _P16M + ",-2/3,3/2",
}

_FAMILIES = {
    ("fp32", 1): _FP32_1D,
    ("fp32", 2): _FP32_2D,
    ("mixed", 1): _MIXED_1D,
    ("mixed", 2): _MIXED_2D,
}

# Published per-point mean L1 errors for the curated sets (fp32 pipeline and
# mixed pipeline), plus the direct-convolution baselines, used as reference
# columns and reproduction targets.
DIRECT_ERROR = {1: 1.75e-8, 2: 4.63e-8}

REFERENCE_ERROR = {
    ("fp32", 1): {4: 2.45e-8, 5: 5.19e-8, 6: 6.92e-8, 7: 9.35e-8, 8: 1.15e-7,
                  9: 2.34e-7, 10: 3.46e-7, 11: 5.91e-7, 12: 7.51e-7,
                  13: 1.32e-6, 14: 1.84e-6, 15: 3.42e-6, 16: 4.26e-6,
                  17: 1.35e-5, 18: 2.24e-5},
    ("fp32", 2): {4: 7.65e-8, 5: 2.35e-7, 6: 3.29e-7, 7: 6.81e-7, 8: 8.79e-7,
                  9: 3.71e-6, 10: 7.35e-6, 11: 2.2e-5, 12: 3.22e-5,
                  13: 1.09e-4, 14: 1.99e-4, 15: 5.54e-4, 16: 8.8e-4,
                  17: 1.07e-2, 18: 1.93e-2},
    ("mixed", 1): {4: 1.87e-8, 5: 3.66e-8, 6: 4.41e-8, 7: 6.09e-8, 8: 6.97e-8,
                   9: 1.55e-7, 10: 2.09e-7, 11: 3.64e-7, 12: 4.50e-7,
                   13: 8.25e-7, 14: 1.11e-6, 15: 2.17e-6, 16: 2.78e-6,
                   17: 8.43e-6, 18: 1.39e-5},
    ("mixed", 2): {4: 5.27e-8, 5: 1.62e-7, 6: 2.14e-7, 7: 3.69e-7, 8: 5.18e-7,
                   9: 2.42e-6, 10: 4.41e-6, 11: 1.27e-5, 12: 1.89e-5,
                   13: 6.38e-5, 14: 1.14e-4, 15: 3.08e-4, 16: 4.95e-4,
                   17: 5.93e-3, 18: 1.04e-2},
}

REFERENCE_MIXED_RATIO = {
    1: {4: 0.76, 5: 0.71, 6: 0.64, 7: 0.65, 8: 0.61, 9: 0.66, 10: 0.6,
        11: 0.62, 12: 0.6, 13: 0.63, 14: 0.6, 15: 0.63, 16: 0.65,
        17: 0.62, 18: 0.62},
    2: {4: 0.69, 5: 0.69, 6: 0.65, 7: 0.54, 8: 0.59, 9: 0.65, 10: 0.6,
        11: 0.58, 12: 0.59, 13: 0.59, 14: 0.57, 15: 0.56, 16: 0.56,
        17: 0.55, 18: 0.54},
}

# Chebyshev-vs-curated error ratios (fp32)
REFERENCE_CHEBYSHEV_RATIO = {
    1: {4: 1.41, 5: 1.06, 6: 1.42, 7: 1.68, 8: 3.07, 9: 2.61, 10: 3.82,
        11: 4.80, 12: 8.86, 13: 9.81, 14: 15.29, 15: 18.21, 16: 30.83,
        17: 21.01, 18: 34.03},
    2: {4: 1.32, 5: 8.62, 6: 1.62, 7: 2.39, 8: 7.06, 9: 6.36, 10: 13.2,
        11: 19.1, 12: 59.4, 13: 80.6, 14: 203.0, 15: 364.0, 16: 1060.0,
        17: 415.0, 18: 11200.0},
}

# Channel-summation tables (fp32 pipeline, and mixed pipeline): per output
# size, the pairwise/linear error ratio in percent for 32 and 64 channels.
# Output size 1 is the direct-convolution row.
REFERENCE_CHANNEL_RATIO = {
    ("fp32", 1): {1: (69, 56), 2: (71, 57), 3: (72, 59), 4: (74, 62),
                  5: (77, 62), 6: (75, 63), 7: (74, 61)},
    ("fp32", 2): {1: (75, 62), 2: (71, 58), 3: (73, 58), 4: (75, 61),
                  5: (73, 61), 6: (75, 61), 7: (73, 61)},
    ("mixed", 1): {1: (70, 56), 2: (64, 53), 3: (68, 56), 4: (69, 56),
                   5: (70, 55), 6: (68, 55), 7: (69, 56)},
    ("mixed", 2): {1: (75, 62), 2: (65, 53), 3: (67, 54), 4: (66, 54),
                   5: (67, 54), 6: (67, 54), 7: (69, 54)},
}

# Combined improvement (mixed + pairwise over fp32 + linear), in percent.
REFERENCE_COMBINED_RATIO = {
    1: {1: (69, 56), 2: (61, 51), 3: (62, 53), 4: (62, 53), 5: (65, 53),
        6: (60, 51), 7: (62, 53)},
    2: {1: (75, 62), 2: (61, 51), 3: (63, 52), 4: (66, 55), 5: (52, 44),
        6: (59, 50), 7: (62, 52)},
}

SIZES = tuple(range(4, 19))


def curated_points(n: int, dims: int, family: str = "fp32") -> tuple[Point, ...]:
    """The curated n-point set (finite accretion order + infinity last)."""
    try:
        text = _FAMILIES[(family, dims)][n]
    except KeyError as exc:
        raise KeyError(f"no curated set for n={n}, dims={dims}, "
                       f"family={family!r}") from exc
    return parse_points(text + ",inf")


@lru_cache(maxsize=None)
def curated_transform(n: int, dims: int, family: str = "fp32") -> TransformSet:
    pts = curated_points(n, dims, family)
    return build_transforms(KERNEL_SIZE, n - KERNEL_SIZE + 1, pts)


def candidate_pool() -> tuple[Fraction, ...]:
    """The 23 candidate rationals: numerators -4..4 over denominators 1..4,
    deduplicated after reduction."""
    vals = sorted({Fraction(num, den)
                   for num, den in product(range(-4, 5), range(1, 5))})
    return tuple(vals)
