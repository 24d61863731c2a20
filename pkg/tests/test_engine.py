"""Convolution execution: ordering, precision modes, and summation."""

from fractions import Fraction

import numpy as np
import pytest

from conftest import batch_inputs
from toomcook.engine import (
    ConvConfig,
    EvalLeaf,
    EvalNode,
    conv_1d,
    conv_1d_exact,
    conv_2d,
    conv_2d_exact,
    conv_direct,
    conv_direct_exact,
    dot_with_order,
    huffman_order,
    linear_order,
    pairwise_sum,
    row_trees,
    tree_depth,
    tree_leaves,
)
from toomcook.exact import parse_points
from toomcook.transforms import build_modified, build_toom_cook, build_transforms

F23 = build_modified(3, 2, parse_points("0,1,-1,inf"))


def _leaf_depths(tree, depth=0):
    if isinstance(tree, EvalLeaf):
        yield tree, depth
        return
    yield from _leaf_depths(tree.left, depth + 1)
    yield from _leaf_depths(tree.right, depth + 1)


class TestConvConfig:
    def test_defaults(self):
        cfg = ConvConfig()
        assert (cfg.precision, cfg.dot_order, cfg.channel_sum) == \
            ("fp32", "huffman", "linear")

    def test_validation(self):
        with pytest.raises(ValueError):
            ConvConfig(precision="fp16")
        with pytest.raises(ValueError):
            ConvConfig(dot_order="random")
        with pytest.raises(ValueError):
            ConvConfig(channel_sum="kahan")


class TestConvDirect:
    def test_delta_kernel(self):
        out = conv_direct([0.0, 1.0, 0.0], [1.5, -2.25, 0.75, 4.0], 1, "fp64")
        assert np.array_equal(out, [-2.25, 0.75])

    def test_box_kernel(self):
        out = conv_direct([1.0, 1.0, 1.0], [1.0, 1.0, 1.0, 1.0], 1, "fp64")
        assert np.array_equal(out, [3.0, 3.0])

    def test_against_exact_oracle(self):
        rng = np.random.default_rng(40)
        for _ in range(50):
            h = rng.uniform(-1, 1, 3)
            x = rng.uniform(-1, 1, 7)
            got = conv_direct(h, x, 1, "fp64")
            exact = conv_direct_exact([Fraction(v) for v in h],
                                      [Fraction(v) for v in x], 1)
            bound = 4 * 2.0 ** -53 * np.abs(h).sum() * np.abs(x).max()
            assert np.all(np.abs(got - np.array([float(e) for e in exact]))
                          <= bound)

    def test_2d_delta(self):
        h = np.zeros((3, 3))
        h[1, 1] = 1.0
        x = np.arange(25.0).reshape(5, 5)
        out = conv_direct(h, x, 2, "fp64")
        assert np.array_equal(out, x[1:4, 1:4])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            conv_direct(np.zeros((2, 3)), np.zeros((3, 6)), 1)
        with pytest.raises(ValueError):
            conv_direct(np.zeros(5), np.zeros(3), 1)


class TestHuffmanOrder:
    def test_textbook_merge(self):
        tree = huffman_order([1, 1, 2, 4])
        # the two 1s merge first, then against 2, then against 4
        assert isinstance(tree, EvalNode)
        depths = {leaf.col: d for leaf, d in _leaf_depths(tree)}
        assert depths == {0: 3, 1: 3, 2: 2, 3: 1}

    def test_single_leaf(self):
        tree = huffman_order([0, 5, 0])
        assert tree == EvalLeaf(1, Fraction(5))

    def test_all_zero_row(self):
        assert huffman_order([0, 0, 0]) is None

    def test_zeros_excluded(self):
        tree = huffman_order([1, 0, 2, 0, 4])
        assert sorted(l.col for l in tree_leaves(tree)) == [0, 2, 4]

    def test_deterministic(self):
        a = huffman_order([1, 1, 1, 1])
        b = huffman_order([1, 1, 1, 1])
        assert a == b

    def test_permuting_points_permutes_b_t_rows_only(self):
        a = build_toom_cook(3, 2, parse_points("0,1,-1,2"))
        b = build_toom_cook(3, 2, parse_points("2,1,-1,0"))
        ta = row_trees(a, "B_T", "huffman")
        tb = row_trees(b, "B_T", "huffman")
        assert ta[0] == tb[3] and ta[3] == tb[0]
        assert ta[1] == tb[1] and ta[2] == tb[2]

    def test_depth(self):
        assert tree_depth(huffman_order([1])) == 0
        assert tree_depth(huffman_order([1, 1, 1, 1])) == 2
        assert tree_depth(None) == 0

    def test_linear_order_left_deep(self):
        tree = linear_order([2, 0, 3, 4])
        assert tree_depth(tree) == 2
        assert [l.col for l in tree_leaves(tree)] == [0, 2, 3]


class TestDotWithOrder:
    def test_identity(self):
        tree = huffman_order([1])
        x = np.array([0.7303, 2.25], dtype=np.float32)
        assert dot_with_order(tree, x[:1], "fp32") == x[0]

    def test_power_of_two_products_exact(self):
        rng = np.random.default_rng(41)
        coeffs = [Fraction(1, 4), Fraction(-2), Fraction(8), Fraction(1, 2)]
        x = rng.uniform(-1, 1, 4).astype(np.float32)
        for c, xi in zip(coeffs, x):
            p32 = np.float32(float(c)) * xi
            p64 = np.float64(float(c)) * np.float64(xi)
            assert np.float64(p32) == p64

    def test_fp32_dot_within_alpha_bound(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            row = [Fraction(int(rng.integers(-8, 9)), int(rng.integers(1, 5)))
                   for _ in range(6)]
            x = rng.uniform(-1, 1, 6).astype(np.float32)
            tree = huffman_order(row)
            if tree is None:
                continue
            got = dot_with_order(tree, x, "fp32")
            exact = sum((r * Fraction(float(v)) for r, v in zip(row, x)),
                        Fraction(0))
            alpha = tree_depth(tree) + 2
            bound = (alpha * 2.0 ** -24
                     * float(sum(abs(r) * abs(Fraction(float(v)))
                                 for r, v in zip(row, x))))
            assert abs(float(got) - float(exact)) <= bound + 1e-30

    def test_empty_tree_zero(self):
        assert dot_with_order(None, np.ones(3), "fp32") == 0.0


class TestConv1D:
    def test_fp64_matches_exact(self):
        rng = np.random.default_rng(43)
        for _ in range(50):
            h = rng.uniform(-1, 1, 3)
            x = rng.uniform(-1, 1, 4)
            out = conv_1d(F23, h, x, ConvConfig(precision="fp64"))
            exact = conv_1d_exact(F23, [Fraction(v) for v in h],
                                  [Fraction(v) for v in x])
            ref = np.array([float(e) for e in exact])
            assert np.all(np.abs(out - ref) <= 16 * 2.0 ** -53 *
                          np.maximum(np.abs(ref), 1.0))

    def test_zero_input_zero_output(self):
        for prec in ("fp32", "fp64", "mixed"):
            for order in ("linear", "huffman"):
                out = conv_1d(F23, np.zeros(3, np.float32),
                              np.zeros(4, np.float32),
                              ConvConfig(precision=prec, dot_order=order))
                assert np.all(out == 0.0)

    def test_channel_cancellation(self):
        h1 = np.array([0.3, -0.7, 0.2], dtype=np.float32)
        x1 = np.array([0.1, 0.5, -0.4, 0.9], dtype=np.float32)
        h = np.stack([h1, -h1])
        x = np.stack([x1, x1])
        out = conv_1d(F23, h, x, ConvConfig(channel_sum="linear"))
        assert np.all(out == 0.0)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            conv_1d(F23, np.zeros(4), np.zeros(4))
        with pytest.raises(ValueError):
            conv_1d(F23, np.zeros((2, 3)), np.zeros((3, 4)))

    def test_point_order_invariance_huffman(self):
        hb, xb = batch_inputs(50, 100, 1, 3, 5)
        base = build_transforms(3, 3, parse_points("0,-1,1,1/2,inf"))
        out0 = conv_1d(base, hb, xb, ConvConfig(dot_order="huffman"))
        for ptxt in ("-1,1,0,1/2,inf", "1/2,1,-1,0,inf", "1,1/2,0,-1,inf"):
            ts = build_transforms(3, 3, parse_points(ptxt))
            out = conv_1d(ts, hb, xb, ConvConfig(dot_order="huffman"))
            assert np.array_equal(out0, out)

    def test_batched_equals_scalar_calls(self):
        hb, xb = batch_inputs(51, 10, 1, 3, 4)
        cfg = ConvConfig()
        out = conv_1d(F23, hb, xb, cfg)
        for t in range(10):
            single = conv_1d(F23, hb[t], xb[t], cfg)
            assert np.array_equal(out[t], single)

    def test_mixed_output_dtype(self):
        hb, xb = batch_inputs(52, 4, 1, 3, 4)
        assert conv_1d(F23, hb, xb, ConvConfig(precision="mixed")).dtype == np.float64
        assert conv_1d(F23, hb, xb, ConvConfig(precision="fp32")).dtype == np.float32


class TestConv2D:
    def test_delta_kernel(self):
        rng = np.random.default_rng(44)
        x = rng.uniform(-1, 1, (4, 4)).astype(np.float32)
        h = np.zeros((3, 3), dtype=np.float32)
        h[1, 1] = 1.0
        out = conv_2d(F23, h, x, ConvConfig())
        assert np.allclose(out, x[1:3, 1:3], rtol=1e-5, atol=1e-6)

    def test_separable_matches_outer_product(self):
        rng = np.random.default_rng(45)
        h = rng.uniform(-1, 1, 3)
        x = rng.uniform(-1, 1, 4)
        cfg = ConvConfig(precision="fp64")
        s1 = conv_1d(F23, h, x, cfg)
        s2 = conv_2d(F23, np.outer(h, h), np.outer(x, x), cfg)
        tol = 8 * 16 * 2.0 ** -53
        assert np.all(np.abs(s2 - np.outer(s1, s1)) <= tol * np.maximum(
            np.abs(np.outer(s1, s1)), 1.0))

    def test_2d_exact_pipeline(self):
        rng = np.random.default_rng(46)
        h = [[Fraction(int(rng.integers(-9, 10)), 4) for _ in range(3)]
             for _ in range(3)]
        x = [[Fraction(int(rng.integers(-9, 10)), 8) for _ in range(4)]
             for _ in range(4)]
        assert conv_2d_exact(F23, h, x) == conv_direct_exact(h, x, 2)

    def test_zero_preserved(self):
        out = conv_2d(F23, np.zeros((2, 3, 3)), np.zeros((2, 4, 4)),
                      ConvConfig(precision="mixed", channel_sum="pairwise"))
        assert np.all(out == 0.0)


class TestPairwiseSum:
    def test_small_integers_exact(self):
        assert pairwise_sum([1.0, 2.0, 3.0, 4.0], "fp32") == 10.0

    def test_single_value(self):
        assert pairwise_sum([3.25], "fp32") == np.float32(3.25)

    def test_validation(self):
        with pytest.raises(ValueError):
            pairwise_sum([], "fp32")

    def test_beats_linear_statistically(self):
        rng = np.random.default_rng(47)
        wins = 0
        for _ in range(1000):
            vals = rng.uniform(0, 1, 64).astype(np.float32)
            ref = np.float64(vals).sum()
            pw = np.float64(pairwise_sum(vals, "fp32"))
            lin = np.float32(0.0)
            for v in vals:
                lin = lin + v
            if abs(pw - ref) <= abs(np.float64(lin) - ref):
                wins += 1
        assert wins >= 800

    def test_odd_count(self):
        vals = np.array([1.0, 2.0, 3.0, 4.0, 5.0], dtype=np.float32)
        assert pairwise_sum(vals, "fp32") == 15.0
