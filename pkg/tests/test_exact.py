"""Exact rational arithmetic, polynomials, float conversion, and points."""

from fractions import Fraction

import numpy as np
import pytest

from toomcook.exact import (
    INFINITY,
    Point,
    Polynomial,
    format_points,
    format_rational,
    is_power_of_two,
    is_representable,
    parse_point,
    parse_points,
    parse_rational,
    point,
    poly_product,
    to_nearest_float,
    validate_point_set,
)


class TestRationalArithmetic:
    def test_add(self):
        assert Fraction(1, 2) + Fraction(1, 3) == Fraction(5, 6)

    def test_mul(self):
        assert Fraction(-4, 3) * Fraction(3, 4) == Fraction(-1)

    def test_div_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            Fraction(1) / Fraction(0)

    def test_canonical_form(self):
        v = Fraction(6, -4)
        assert v.denominator > 0
        assert (abs(v.numerator), v.denominator) == (3, 2)

    def test_algebraic_identities(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a = Fraction(int(rng.integers(-50, 50)), int(rng.integers(1, 20)))
            b = Fraction(int(rng.integers(-50, 50)), int(rng.integers(1, 20)))
            assert (a + b) - b == a
            assert a + b == b + a
            assert a * b == b * a
            if b != 0:
                assert (a / b) * b == a

    def test_parse_format_roundtrip(self):
        for text in ("0", "-1", "1/2", "-4/3", "7"):
            assert format_rational(parse_rational(text)) == text

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_rational("0.5")
        with pytest.raises(ValueError):
            parse_rational("1/0")


class TestToNearestFloat:
    def test_power_of_two_exact(self):
        assert float(to_nearest_float(Fraction(1, 2), "fp32")) == 0.5

    def test_third_not_exact(self):
        f = to_nearest_float(Fraction(1, 3), "fp32")
        assert Fraction(float(f)) != Fraction(1, 3)
        assert abs(Fraction(float(f)) - Fraction(1, 3)) < Fraction(1, 2 ** 24)

    def test_minus_three_exact(self):
        # two significant binary digits: representable at any precision
        assert float(to_nearest_float(Fraction(-3), "fp32")) == -3.0

    def test_roundtrip_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            x = float(rng.uniform(-10, 10))
            assert float(to_nearest_float(Fraction(x), "fp64")) == x
            x32 = np.float32(x)
            assert to_nearest_float(Fraction(float(x32)), "fp32") == x32

    def test_correct_rounding_against_numpy_on_representables(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            num = int(rng.integers(-10 ** 6, 10 ** 6))
            den = int(rng.integers(1, 10 ** 4))
            v = Fraction(num, den)
            got = to_nearest_float(v, "fp32")
            # nearest means no other float32 is closer
            lo = np.nextafter(got, np.float32(-np.inf))
            hi = np.nextafter(got, np.float32(np.inf))
            d = abs(v - Fraction(float(got)))
            assert d <= abs(v - Fraction(float(lo)))
            assert d <= abs(v - Fraction(float(hi)))

    def test_overflow(self):
        with pytest.raises(OverflowError):
            to_nearest_float(Fraction(2) ** 200, "fp32")
        assert float(to_nearest_float(Fraction(2) ** 200, "fp64")) == 2.0 ** 200
        with pytest.raises(OverflowError):
            to_nearest_float(Fraction(2) ** 2000, "fp64")

    def test_is_representable_and_power_of_two(self):
        assert is_representable(Fraction(3, 4), "fp32")
        assert not is_representable(Fraction(1, 3), "fp32")
        assert is_power_of_two(Fraction(1, 4))
        assert is_power_of_two(Fraction(-8))
        assert not is_power_of_two(Fraction(3, 4))
        assert not is_power_of_two(Fraction(0))


class TestPolynomial:
    def test_difference_of_squares(self):
        p = poly_product([Polynomial.from_root(Fraction(1)),
                          Polynomial.from_root(Fraction(-1))])
        assert p.coeffs == (Fraction(-1), Fraction(0), Fraction(1))

    def test_single_root(self):
        assert Polynomial.from_root(Fraction(0)).coeffs == (Fraction(0), Fraction(1))

    def test_four_factor_product(self):
        roots = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2)]
        p = poly_product([Polynomial.from_root(r) for r in roots])
        assert p.coeffs == (Fraction(1, 4), Fraction(0), Fraction(-5, 4),
                            Fraction(0), Fraction(1))

    def test_empty_product_rejected(self):
        with pytest.raises(ValueError):
            poly_product([])

    def test_degree_is_sum_of_factor_degrees(self):
        rng = np.random.default_rng(4)
        roots = [Fraction(int(rng.integers(-5, 5)), int(rng.integers(1, 4)))
                 for _ in range(6)]
        p = poly_product([Polynomial.from_root(r) for r in roots])
        assert p.degree == 6

    def test_evaluation_matches_factor_product(self):
        rng = np.random.default_rng(5)
        roots = [Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 5)))
                 for _ in range(5)]
        factors = [Polynomial.from_root(r) for r in roots]
        p = poly_product(factors)
        for _ in range(10):
            x = Fraction(int(rng.integers(-20, 20)), int(rng.integers(1, 9)))
            expected = Fraction(1)
            for f in factors:
                expected *= f.evaluate(x)
            assert p.evaluate(x) == expected

    def test_zero_polynomial_empty(self):
        assert Polynomial([0, 0]).coeffs == ()
        assert (Polynomial([1, 1]) * Polynomial([])).coeffs == ()


class TestPoints:
    def test_parse_canonical(self):
        pts = parse_points("0,-1,1/2,inf")
        assert [str(p) for p in pts] == ["0", "-1", "1/2", "inf"]
        assert pts[-1].is_infinite

    def test_format_points(self):
        assert format_points(parse_points("0,-4/3,inf")) == "0,-4/3,inf"

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError):
            validate_point_set(parse_points("0,1,1,2"))

    def test_duplicate_infinity_rejected(self):
        with pytest.raises(ValueError):
            validate_point_set(parse_points("0,inf,inf"))

    def test_equivalent_spellings_collide(self):
        with pytest.raises(ValueError):
            validate_point_set(parse_points("1/2,2/4"))

    def test_sort_key_orders_infinity_last(self):
        pts = [INFINITY, point(2), point(-1)]
        ordered = sorted(pts, key=Point.sort_key)
        assert [str(p) for p in ordered] == ["-1", "2", "inf"]

    def test_parse_point_unicode_minus(self):
        assert parse_point("−5/4").value == Fraction(-5, 4)
