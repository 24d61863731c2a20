"""Exact rational scaffolding: fractions, polynomials, interpolation points.

All symbolic matrix construction runs on ``fractions.Fraction``, which already
gives canonical-form, arbitrary-precision rational arithmetic (Python ints
never overflow).  This module adds what Fraction lacks: correctly rounded
conversion into a target floating-point format, dense polynomial products,
and the finite/infinity point type with its canonical text spelling.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction

PRECISIONS = ("fp32", "fp64")

# Round-to-nearest overflows once |v| reaches max + half an ulp of the top
# binade: 2^128 - 2^103 for binary32, 2^1024 - 2^970 for binary64.
_OVERFLOW_THRESHOLD = {
    "fp32": Fraction(2**128 - 2**103),
    "fp64": Fraction(2**1024 - 2**970),
}

_CAST = {"fp32": np.float32, "fp64": np.float64}


def parse_rational(text: str) -> Fraction:
    """Parse the canonical fraction spelling: "0", "-1", "1/2", "-4/3"."""
    t = text.strip().replace("−", "-")
    try:
        if "/" in t:
            num, den = t.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(v: Fraction) -> str:
    """Decimal-free fraction string, e.g. "-5/4" or "7"."""
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _even_mantissa(f: float, precision: str) -> bool:
    if precision == "fp32":
        bits = struct.unpack("<I", struct.pack("<f", f))[0]
    else:
        bits = struct.unpack("<Q", struct.pack("<d", f))[0]
    return bits & 1 == 0


def to_nearest_float(v: Fraction, precision: str = "fp64"):
    """Round an exact rational to the nearest float of the given precision.

    Round-to-nearest, ties-to-even.  Exact whenever ``v`` is representable.
    Raises OverflowError when |v| is at or beyond the rounding threshold of
    the format.
    """
    if precision not in PRECISIONS:
        raise ValueError(f"unknown precision: {precision!r}")
    v = Fraction(v)
    if abs(v) >= _OVERFLOW_THRESHOLD[precision]:
        raise OverflowError(f"{format_rational(v)} overflows {precision}")
    # CPython's big-int true division is correctly rounded to binary64.
    f64 = v.numerator / v.denominator
    if precision == "fp64":
        return np.float64(f64)
    # Narrowing through binary64 can double-round; fix up against the
    # exact value by checking the neighbouring binary32 values.
    f = np.float32(f64)
    lo = np.nextafter(f, np.float32(-np.inf))
    hi = np.nextafter(f, np.float32(np.inf))
    best = f
    best_err = abs(v - Fraction(float(f)))
    for cand in (lo, hi):
        if not np.isfinite(cand):
            continue
        err = abs(v - Fraction(float(cand)))
        if err < best_err or (err == best_err and _even_mantissa(float(cand), "fp32")
                              and not _even_mantissa(float(best), "fp32")):
            best, best_err = cand, err
    return np.float32(best)


def is_representable(v: Fraction, precision: str = "fp64") -> bool:
    """True iff v converts to the target precision without rounding error."""
    try:
        return Fraction(float(to_nearest_float(v, precision))) == Fraction(v)
    except OverflowError:
        return False


def is_power_of_two(v: Fraction) -> bool:
    """True iff |v| = 2^k for integer k (multiplication by v is exact)."""
    v = Fraction(v)
    if v == 0:
        return False
    num, den = abs(v.numerator), v.denominator
    return (num & (num - 1)) == 0 and (den & (den - 1)) == 0


class Polynomial:
    """Dense univariate polynomial over the rationals.

    ``coeffs[k]`` is the coefficient of a^k.  The zero polynomial has an
    empty coefficient tuple; otherwise the leading coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int]):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_root(cls, p: Fraction) -> "Polynomial":
        """The monic linear factor (a - p)."""
        return cls([-Fraction(p), Fraction(1)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.coeffs or not other.coeffs:
            return Polynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[format_rational(c) for c in self.coeffs]})"

    def evaluate(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def padded(self, length: int) -> tuple[Fraction, ...]:
        if len(self.coeffs) > length:
            raise ValueError("polynomial longer than requested padding")
        return self.coeffs + (Fraction(0),) * (length - len(self.coeffs))


def poly_product(factors: Sequence[Polynomial]) -> Polynomial:
    """Exact product of a nonempty list of polynomials."""
    if not factors:
        raise ValueError("poly_product requires at least one factor")
    acc = factors[0]
    for f in factors[1:]:
        acc = acc * f
    return acc


@dataclass(frozen=True)
class Point:
    """An interpolation point: a finite rational, or the infinity pseudo-point
    (value None) that selects the modified algorithm."""

    value: Fraction | None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def sort_key(self):
        # Finite points order by value; infinity sorts last.  Used as the
        # permutation-invariant tie-break key for Huffman trees over A^T rows.
        if self.value is None:
            return (1, Fraction(0))
        return (0, self.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else format_rational(self.value)


INFINITY = Point(None)


def point(v) -> Point:
    """Finite point from any Fraction-convertible value."""
    return Point(Fraction(v))


def parse_point(text: str) -> Point:
    t = text.strip().replace("∞", "inf")
    if t.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    return Point(parse_rational(t))


def parse_points(text: str) -> tuple[Point, ...]:
    """Parse a comma-separated point list, e.g. "0,-1,1,inf"."""
    items = [s for s in (p.strip() for p in text.split(",")) if s]
    if not items:
        raise ValueError("empty point list")
    return tuple(parse_point(s) for s in items)


def validate_point_set(points: Sequence[Point]) -> None:
    """Points must be pairwise distinct with at most one infinity."""
    seen = set()
    infinities = 0
    for p in points:
        if p.is_infinite:
            infinities += 1
            if infinities > 1:
                raise ValueError("duplicate infinity pseudo-point")
        else:
            if p.value in seen:
                raise ValueError(f"duplicate point {p}")
            seen.add(p.value)


def format_points(points: Sequence[Point]) -> str:
    return ",".join(str(p) for p in points)
