"""Analytic bounds, norms, conditioning, and running error."""

import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import batch_inputs
from toomcook.analysis import (
    bound_1d,
    bound_2d,
    bound_modified_last_output,
    bound_multichannel,
    channel_lambda,
    classify_matrix,
    condition_bound,
    constants_for,
    jacobi_singular_values,
    khatri_rao_rowwise,
    matrix_norms,
    running_error_1d,
    summation_constants,
)
from toomcook.engine import ConvConfig, conv_1d, conv_direct, huffman_order
from toomcook.exact import parse_points
from toomcook.pointsets import curated_transform
from toomcook.transforms import build_modified, build_toom_cook

F23 = build_modified(3, 2, parse_points("0,1,-1,inf"))


class TestSummationConstants:
    def test_linear_general(self):
        c = summation_constants("linear", 4, 3, "general")
        assert c.alpha == 5

    def test_linear_power_of_two(self):
        c = summation_constants("linear", 4, 3, "power_of_two")
        assert c.alpha == 3

    def test_linear_exact(self):
        c = summation_constants("linear", 4, 3, "exact")
        assert (c.alpha, c.gamma) == (4, 3)

    def test_huffman_balanced_exact(self):
        trees = {"A_T": [huffman_order([1, 1, 1, 1])],
                 "B_T": [huffman_order([1, 1, 1, 1])],
                 "G": [huffman_order([1, 1, 1])]}
        c = summation_constants("huffman", 4, 3, "exact", trees)
        assert c.alpha == 2 + 1

    def test_huffman_requires_trees(self):
        with pytest.raises(ValueError):
            summation_constants("huffman", 4, 3, "exact")

    def test_classify_matrix(self):
        assert classify_matrix(F23, "A_T", "fp32") == "power_of_two"
        assert classify_matrix(F23, "G", "fp32") == "power_of_two"
        # point differences with factor 3 make the scalings inexact
        assert classify_matrix(curated_transform(6, 1), "G", "fp32") == "general"
        assert classify_matrix(curated_transform(12, 1), "B_T", "fp32") == "general"

    def test_corollary_factor_for_linear_general(self):
        # alpha+beta+gamma+1 collapses to n_h + 2n + 4
        for n_h, n_o in ((3, 2), (3, 6), (5, 2)):
            n = n_h + n_o - 1
            c = summation_constants("linear", n, n_h, "general")
            assert c.factor_1d == n_h + 2 * n + 4


class TestMatrixNorms:
    def test_identity(self):
        norms = matrix_norms(np.eye(3))
        assert norms["one_norm"] == 1.0
        assert norms["frobenius"] == pytest.approx(math.sqrt(3))

    def test_hand_computed(self):
        norms = matrix_norms([[1, -2], [3, 4]])
        assert norms["one_norm"] == 6.0
        assert norms["frobenius"] == pytest.approx(math.sqrt(30))

    def test_frobenius_transpose_invariant(self):
        rng = np.random.default_rng(60)
        for _ in range(100):
            m = rng.normal(size=(4, 6))
            assert matrix_norms(m)["frobenius"] == pytest.approx(
                matrix_norms(m.T)["frobenius"])

    def test_two_norm_frobenius_sandwich(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            m = rng.normal(size=(6, 6))
            sv = np.linalg.svd(m, compute_uv=False)
            fro = matrix_norms(m)["frobenius"]
            r = np.linalg.matrix_rank(m)
            assert sv[0] <= fro + 1e-12
            assert fro <= math.sqrt(r) * sv[0] + 1e-12


class TestBound1D:
    def test_zero_kernel_zero_bound(self):
        consts = constants_for(F23, "huffman")
        rep = bound_1d(F23, np.zeros(3), np.ones(4), consts)
        assert float(rep.normwise_bound) == 0.0
        assert np.all(rep.componentwise_bounds == 0.0)

    def test_linear_in_input_norm(self):
        consts = constants_for(F23, "huffman")
        x = np.array([0.3, -0.1, 0.8, 0.5])
        h = np.array([0.2, -0.4, 0.9])
        a = bound_1d(F23, h, x, consts)
        b = bound_1d(F23, h, 2 * x, consts)
        assert float(b.normwise_bound) == pytest.approx(
            2 * float(a.normwise_bound))

    def test_dominates_measured_error(self):
        hb, xb = batch_inputs(62, 2000, 1, 3, 4)
        consts = constants_for(F23, "huffman")
        out = conv_1d(F23, hb, xb, ConvConfig())
        ref = conv_direct(hb, xb, 1, "fp64")
        l1 = np.abs(out.astype(np.float64) - ref).sum(axis=-1)
        rep = bound_1d(F23, hb[:, 0], xb[:, 0], consts, "fp32")
        assert np.all(l1 <= np.asarray(rep.normwise_bound))

    def test_componentwise_dominates_too(self):
        hb, xb = batch_inputs(63, 2000, 1, 3, 4)
        consts = constants_for(F23, "huffman")
        out = conv_1d(F23, hb, xb, ConvConfig())
        ref = conv_direct(hb, xb, 1, "fp64")
        err = np.abs(out.astype(np.float64) - ref)
        rep = bound_1d(F23, hb[:, 0], xb[:, 0], consts, "fp32")
        assert np.all(err <= rep.componentwise_bounds)

    def test_json_serialization(self):
        consts = constants_for(F23, "huffman")
        rep = bound_1d(F23, np.ones(3), np.ones(4), consts)
        d = rep.to_json_dict()
        assert set(d["norms"]) == {"A_T_one", "A_one", "G_fro", "B_T_fro"}
        assert d["normwise_bound"] > 0


class TestBound2D:
    def test_zero_kernel(self):
        consts = constants_for(F23, "huffman")
        rep = bound_2d(F23, np.zeros((3, 3)), np.ones((4, 4)), consts)
        assert float(rep.normwise_bound) == 0.0

    def test_unit_norm_formula(self):
        consts = constants_for(F23, "huffman")
        h = np.zeros((3, 3))
        h[0, 0] = 1.0
        x = np.zeros((4, 4))
        x[0, 0] = 1.0
        rep = bound_2d(F23, h, x, consts, "fp32")
        n = rep.norms
        expected = (n["A_T_one"] * n["A_one"] * n["G_fro"] ** 2
                    * n["B_T_fro"] ** 2 * rep.factor * rep.epsilon)
        assert float(rep.normwise_bound) == pytest.approx(expected)

    def test_2d_vs_1d_squared_stays_bounded(self):
        ratios = []
        for n in range(4, 11):
            ts = curated_transform(n, 1)
            consts = constants_for(ts, "huffman")
            b1 = bound_1d(ts, np.ones(3), np.ones(ts.n), consts, "fp32")
            b2 = bound_2d(ts, np.ones((3, 3)), np.ones((ts.n, ts.n)),
                          consts, "fp32")
            ratios.append(float(b2.normwise_bound)
                          / float(b1.normwise_bound) ** 2)
        assert max(ratios) / min(ratios) <= 10.0


class TestBoundMultichannel:
    def test_lambda_values(self):
        assert channel_lambda(1, "linear") == 1
        assert channel_lambda(64, "linear") == 64
        assert channel_lambda(64, "pairwise") == 8
        assert channel_lambda(8, "pairwise") == 5

    def test_reduces_to_single_channel(self):
        consts = constants_for(F23, "huffman")
        multi = bound_multichannel(F23, 1, 1, "linear", consts)
        assert multi.factor == consts.factor_1d
        assert multi.lam == 1.0

    def test_pairwise_below_linear_from_8(self):
        consts = constants_for(F23, "huffman")
        for c in (8, 16, 32, 64, 128):
            lin = bound_multichannel(F23, c, 1, "linear", consts)
            pw = bound_multichannel(F23, c, 1, "pairwise", consts)
            assert float(pw.normwise_bound) < float(lin.normwise_bound)

    def test_with_tensors_dominates(self):
        hb, xb = batch_inputs(64, 1000, 1, 3, 4, channels=32)
        consts = constants_for(F23, "huffman")
        out = conv_1d(F23, hb, xb, ConvConfig(channel_sum="pairwise"))
        ref = conv_direct(hb, xb, 1, "fp64")
        l1 = np.abs(out.astype(np.float64) - ref).sum(axis=-1)
        rep = bound_multichannel(F23, 32, 1, "pairwise", consts,
                                 h=hb, x=xb, precision="fp32")
        assert np.all(l1 <= np.asarray(rep.normwise_bound))


class TestModifiedLastOutputBound:
    def test_requires_modified(self):
        ts = build_toom_cook(3, 2, parse_points("0,1,-1,2"))
        with pytest.raises(ValueError):
            bound_modified_last_output(ts, np.ones(3), np.ones(4))

    def test_linear_general_factor(self):
        # with n_h >= 3 the first branch applies: n_h + 2n + 2 for general
        h = np.zeros(3)
        x = np.zeros(4)
        h[2] = 1.0
        x[3] = 1.0
        got = bound_modified_last_output(F23, h, x, element_class="general",
                                         precision="fp32")
        n, n_h = F23.n, F23.n_h
        bt = np.abs(F23.matrix_fp("B_T", "fp64"))
        expected = (bt[n - 1] @ x) * (n_h + 2 * n + 2) * 2.0 ** -24
        assert got == pytest.approx(expected)

    def test_dominates_last_output_error(self):
        hb, xb = batch_inputs(65, 2000, 1, 3, 4)
        out = conv_1d(F23, hb, xb, ConvConfig(dot_order="linear"))
        ref = conv_direct(hb, xb, 1, "fp64")
        err_last = np.abs(out.astype(np.float64) - ref)[:, -1]
        for t in range(0, 2000, 100):
            b = bound_modified_last_output(F23, hb[t, 0], xb[t, 0])
            assert err_last[t] <= b


class TestKhatriRao:
    def test_definition(self):
        out = khatri_rao_rowwise(np.array([[1.0, 0.0]]), np.array([[2.0, 3.0]]))
        assert np.array_equal(out, [[2.0, 3.0, 0.0, 0.0]])

    def test_shapes(self):
        out = khatri_rao_rowwise(F23.matrix_fp("B_T", "fp64"),
                                 F23.matrix_fp("G", "fp64"))
        assert out.shape == (F23.n, F23.n * F23.n_h)

    def test_row_count_mismatch(self):
        with pytest.raises(ValueError):
            khatri_rao_rowwise(np.ones((3, 3)), np.ones((4, 2)))

    def test_factorization_identity_exact(self):
        # (B^T kr G)(x kron h) = B^T x o G h over exact rationals
        rng = np.random.default_rng(66)
        bt = np.array(F23.matrix("B_T"), dtype=object)
        g = np.array(F23.matrix("G"), dtype=object)
        kr = khatri_rao_rowwise(bt, g)
        for _ in range(100):
            h = np.array([Fraction(int(v), 7) for v in rng.integers(-9, 9, 3)],
                         dtype=object)
            x = np.array([Fraction(int(v), 5) for v in rng.integers(-9, 9, 4)],
                         dtype=object)
            lhs = kr.dot(np.kron(x, h))
            rhs = bt.dot(x) * g.dot(h)
            assert np.all(lhs == rhs)


class TestJacobiSVD:
    def test_against_lapack(self):
        rng = np.random.default_rng(67)
        for shape in ((5, 5), (8, 3), (3, 8)):
            m = rng.normal(size=shape)
            got = jacobi_singular_values(m)
            ref = np.linalg.svd(m, compute_uv=False)
            assert np.allclose(got, ref, rtol=1e-10, atol=1e-12)

    def test_rank_deficient(self):
        m = np.outer([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        got = jacobi_singular_values(m)
        assert got[0] > 1.0
        assert abs(got[1]) < 1e-8 and abs(got[2]) < 1e-8


class TestConditionBound:
    def test_trivial_scalar_case(self):
        ts = build_toom_cook(1, 1, parse_points("0"))
        est = condition_bound(ts, [2.0], [3.0])
        assert est.kappa == pytest.approx(1.0)
        assert est.bound == pytest.approx(3.0)
        assert not est.singular

    def test_scales_with_input_l1(self):
        x = np.array([0.5, 1.0, -2.0, 0.25])
        h = np.array([0.1, 0.2, 0.1])
        a = condition_bound(F23, h, x)
        b = condition_bound(F23, h, 2 * x)
        assert b.bound == pytest.approx(2 * a.bound)

    def test_exponential_growth_over_sizes(self):
        # conditioning dips locally at the fully symmetric 8-point set, so
        # strict per-step monotonicity fails; the exponential trend holds
        kappas = []
        for n in range(4, 13):
            ts = curated_transform(n, 1)
            est = condition_bound(ts, np.ones(3), np.ones(ts.n))
            assert not est.singular
            kappas.append(est.kappa)
        for i in range(len(kappas) - 4):
            assert kappas[i + 4] > kappas[i]
        assert kappas[-1] > 50 * kappas[0]
        slope = np.polyfit(range(4, 13), np.log(kappas), 1)[0]
        assert slope > 0.3


class TestRunningError:
    def test_zero_input_zero_bound(self):
        out, bound = running_error_1d(F23, np.zeros(3, np.float32),
                                      np.zeros(4, np.float32), ConvConfig())
        assert np.all(out == 0.0)
        assert np.all(bound == 0.0)

    def test_values_match_engine(self):
        hb, xb = batch_inputs(68, 500, 1, 3, 4)
        cfg = ConvConfig()
        out, _ = running_error_1d(F23, hb, xb, cfg)
        assert np.array_equal(out, conv_1d(F23, hb, xb, cfg))

    def test_statistical_dominance_and_ratio(self):
        hb, xb = batch_inputs(0, 2000, 1, 3, 4)
        out, bound = running_error_1d(F23, hb, xb, ConvConfig())
        ref = conv_direct(hb, xb, 1, "fp64")
        actual = np.abs(out.astype(np.float64) - ref)
        coverage = (bound >= actual).all(axis=-1).mean()
        assert coverage >= 0.99
        ratio = bound.mean() / actual.mean()
        assert 2.0 <= ratio <= 10.0

    def test_multichannel_pairwise_path(self):
        hb, xb = batch_inputs(69, 200, 1, 3, 4, channels=8)
        cfg = ConvConfig(channel_sum="pairwise")
        out, bound = running_error_1d(F23, hb, xb, cfg)
        assert np.array_equal(out, conv_1d(F23, hb, xb, cfg))
        ref = conv_direct(hb, xb, 1, "fp64")
        actual = np.abs(out.astype(np.float64) - ref)
        assert (bound >= actual).mean() >= 0.99
