"""Construction of Toom-Cook convolution transform triples.

``build_toom_cook`` realises the classic construction from a set of distinct
finite interpolation points; ``build_modified`` realises the variant that
solves a one-smaller problem and corrects the last output through the
infinity pseudo-point.  Everything is computed over exact rationals; rounded
fp32/fp64 copies of each matrix are derived from the exact entries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import (
    Point,
    Polynomial,
    format_rational,
    parse_point,
    parse_rational,
    point,
    poly_product,
    to_nearest_float,
    validate_point_set,
)

MATRIX_NAMES = ("A_T", "G", "B_T")

ExactMatrix = tuple[tuple[Fraction, ...], ...]


def _exact_matrix(rows) -> ExactMatrix:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


class TransformSet:
    """The (A^T, G, B^T) triple for one fixed convolution size.

    Immutable by convention.  Matrices are stored exactly; float copies and
    compiled evaluation programs are cached per precision on first use.
    """

    def __init__(self, n_h: int, n_o: int, points: Sequence[Point],
                 a_t: ExactMatrix, g: ExactMatrix, b_t: ExactMatrix,
                 modified: bool):
        self.n_h = n_h
        self.n_o = n_o
        self.n = n_h + n_o - 1
        self.points = tuple(points)
        self.modified = modified
        self._exact = {"A_T": _exact_matrix(a_t), "G": _exact_matrix(g),
                       "B_T": _exact_matrix(b_t)}
        self._fp: dict[tuple[str, str], np.ndarray] = {}
        self._programs: dict = {}
        self._int_forms: dict[str, tuple[np.ndarray, int]] = {}

    # -- accessors ---------------------------------------------------------

    def matrix(self, name: str) -> ExactMatrix:
        return self._exact[name]

    def matrix_fp(self, name: str, precision: str) -> np.ndarray:
        """Elementwise to-nearest rounding of the exact matrix."""
        key = (name, precision)
        if key not in self._fp:
            exact = self._exact[name]
            arr = np.array([[to_nearest_float(v, precision) for v in row]
                            for row in exact],
                           dtype=np.float32 if precision == "fp32" else np.float64)
            arr.setflags(write=False)
            self._fp[key] = arr
        return self._fp[key]

    def int_form(self, name: str) -> tuple[np.ndarray, int]:
        """Integer-scaled matrix (object dtype) and its common denominator.

        matrix == int_matrix / denominator, exactly.  Used by the exact
        convolution oracle so the hot path stays in integer arithmetic.
        """
        if name not in self._int_forms:
            exact = self._exact[name]
            den = 1
            for row in exact:
                for v in row:
                    den = den * v.denominator // math.gcd(den, v.denominator)
            ints = np.array(
                [[int(v * den) for v in row] for row in exact], dtype=object)
            self._int_forms[name] = (ints, den)
        return self._int_forms[name]

    def square_a_t(self) -> ExactMatrix:
        """The untrimmed n-row square system behind A^T.

        For the modified triple this is the (n-1)-point square Vandermonde
        extended by the infinity row/column of structural zeros and a one.
        """
        finite = [p.value for p in self.points if not p.is_infinite]
        n = self.n
        if not self.modified:
            return _exact_matrix([[p ** i for p in finite] for i in range(n)])
        rows = [[q ** i for q in finite] + [Fraction(0)] for i in range(n - 1)]
        rows.append([Fraction(0)] * (n - 1) + [Fraction(1)])
        return _exact_matrix(rows)

    def descriptor(self) -> dict:
        return {
            "n_h": self.n_h,
            "n_o": self.n_o,
            "n": self.n,
            "modified": self.modified,
            "points": [str(p) for p in self.points],
        }

    def __repr__(self):
        kind = "modified" if self.modified else "toom-cook"
        return (f"TransformSet({kind}, n_h={self.n_h}, n_o={self.n_o}, "
                f"points=[{','.join(str(p) for p in self.points)}])")

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        d = {
            "n_h": self.n_h,
            "n_o": self.n_o,
            "n": self.n,
            "modified": self.modified,
            "points": [str(p) for p in self.points],
        }
        for name in MATRIX_NAMES:
            d[name] = [[format_rational(v) for v in row]
                       for row in self._exact[name]]
        for name in MATRIX_NAMES:
            d[name + "_fp64"] = [[float(v) for v in row]
                                 for row in self.matrix_fp(name, "fp64")]
        return d

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
            fh.write("\n")


def transform_set_from_json(data: dict) -> TransformSet:
    """Rebuild a TransformSet from its JSON dictionary."""
    points = tuple(parse_point(s) for s in data["points"])
    n_h, n_o = int(data["n_h"]), int(data["n_o"])
    n = n_h + n_o - 1
    if len(points) != n:
        raise ValueError(f"expected {n} points, file has {len(points)}")
    validate_point_set(points)
    mats = {}
    shapes = {"A_T": (n_o, n), "G": (n, n_h), "B_T": (n, n)}
    for name in MATRIX_NAMES:
        rows = [[parse_rational(s) for s in row] for row in data[name]]
        if (len(rows), len(rows[0]) if rows else 0) != shapes[name]:
            raise ValueError(f"{name} has wrong shape")
        mats[name] = rows
    return TransformSet(n_h, n_o, points, mats["A_T"], mats["G"], mats["B_T"],
                        modified=bool(data["modified"]))


def read_transform_json(path) -> TransformSet:
    with open(path, "r", encoding="utf-8") as fh:
        return transform_set_from_json(json.load(fh))


# -- builders ---------------------------------------------------------------


def _normalize_points(points: Sequence[Point]) -> tuple[Point, ...]:
    """Validate and move the infinity pseudo-point (if any) to the end."""
    pts = tuple(points)
    validate_point_set(pts)
    finite = [p for p in pts if not p.is_infinite]
    infs = [p for p in pts if p.is_infinite]
    return tuple(finite) + tuple(infs)


def _lagrange_parts(finite: Sequence[Fraction]):
    """Per-point scaling N_i = 1 / prod_{j!=i}(p_i - p_j) and the cofactor
    polynomials M_i(a) = prod_{k!=i}(a - p_k)."""
    n = len(finite)
    scales = []
    cofactors = []
    for i, p in enumerate(finite):
        prod = Fraction(1)
        for j, q in enumerate(finite):
            if j != i:
                prod *= p - q
        scales.append(Fraction(1) / prod)
        others = [Polynomial.from_root(q) for j, q in enumerate(finite) if j != i]
        cofactors.append(poly_product(others) if others else Polynomial([1]))
    return scales, cofactors


def build_toom_cook(n_h: int, n_o: int, points: Sequence[Point]) -> TransformSet:
    """Transform triple from n = n_h + n_o - 1 distinct finite points.

    A^T[i][j] = p_j^i (rows 0..n_o-1), G[i][j] = p_i^j * N_i (columns
    0..n_h-1), and row i of B^T holds the coefficients of M_i(a).
    """
    if n_h < 1 or n_o < 1:
        raise ValueError("kernel and output sizes must be >= 1")
    n = n_h + n_o - 1
    pts = _normalize_points(points)
    if len(pts) != n:
        raise ValueError(f"need {n} points for n_h={n_h}, n_o={n_o}, got {len(pts)}")
    if any(p.is_infinite for p in pts):
        raise ValueError("infinity pseudo-point requires build_modified")
    finite = [p.value for p in pts]
    scales, cofactors = _lagrange_parts(finite)
    a_t = [[p ** i for p in finite] for i in range(n_o)]
    g = [[finite[i] ** j * scales[i] for j in range(n_h)] for i in range(n)]
    b_t = [list(cofactors[i].padded(n)) for i in range(n)]
    return TransformSet(n_h, n_o, pts, a_t, g, b_t, modified=False)


def build_modified(n_h: int, n_o: int, points: Sequence[Point]) -> TransformSet:
    """Modified triple: n-1 finite points plus the infinity pseudo-point.

    Embeds the (n-1)-point triple and appends the structural row/columns:
    G gains the row (0..0 1), A^T the column (0..0 1), and B^T a zero last
    column plus a last row holding the coefficients of M'(a).
    """
    if n_h < 1 or n_o < 1:
        raise ValueError("kernel and output sizes must be >= 1")
    n = n_h + n_o - 1
    pts = _normalize_points(points)
    if len(pts) != n:
        raise ValueError(f"need {n} points for n_h={n_h}, n_o={n_o}, got {len(pts)}")
    if not pts or not pts[-1].is_infinite:
        raise ValueError("build_modified requires exactly one infinity point")
    finite = [p.value for p in pts[:-1]]
    scales, cofactors = _lagrange_parts(finite)
    m_prime = poly_product([Polynomial.from_root(q) for q in finite])

    a_t = [[q ** i for q in finite] + [Fraction(0)] for i in range(n_o)]
    a_t[n_o - 1][n - 1] = Fraction(1)

    g = [[finite[i] ** j * scales[i] for j in range(n_h)] for i in range(n - 1)]
    g.append([Fraction(0)] * (n_h - 1) + [Fraction(1)])

    b_t = [list(cofactors[i].padded(n - 1)) + [Fraction(0)] for i in range(n - 1)]
    b_t.append(list(m_prime.padded(n)))
    return TransformSet(n_h, n_o, pts, a_t, g, b_t, modified=True)


def build_transforms(n_h: int, n_o: int, points: Sequence[Point]) -> TransformSet:
    """Dispatch on the presence of the infinity pseudo-point."""
    pts = tuple(points)
    if any(p.is_infinite for p in pts):
        return build_modified(n_h, n_o, pts)
    return build_toom_cook(n_h, n_o, pts)


def chebyshev_points(n: int) -> tuple[Point, ...]:
    """n Chebyshev nodes cos((2k-1)pi/(2n)) on (-1, 1), rounded to fp64.

    The nodes pass through binary64 before exact construction (the symbolic
    pipeline cannot host irrationals).  Evaluation is symmetrised so the
    middle node of odd n is exactly 0 and mirrored nodes are exact negations.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    values = [0.0] * n
    for k in range(1, n // 2 + 1):
        c = float(np.cos((2 * k - 1) * np.pi / (2 * n)))
        values[k - 1] = c
        values[n - k] = -c
    return tuple(point(Fraction(v)) for v in values)


@dataclass(frozen=True)
class MultCount:
    """General-multiplication accounting for one block size (Table-1 cells)."""

    n_h: int
    n_o: int
    dims: int
    general_mults: int
    mults_per_output: Fraction


def mult_count(n_h: int, n_o: int, dims: int = 1) -> MultCount:
    """Hadamard-stage multiplications: n in 1D, n^2 in 2D, per output block."""
    if n_h < 1 or n_o < 1:
        raise ValueError("kernel and output sizes must be >= 1")
    if dims not in (1, 2):
        raise ValueError("dims must be 1 or 2")
    n = n_h + n_o - 1
    if dims == 1:
        return MultCount(n_h, n_o, 1, n, Fraction(n, n_o))
    return MultCount(n_h, n_o, 2, n * n, Fraction(n * n, n_o * n_o))
