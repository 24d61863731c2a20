"""Worst-case error bounds, summation constants, conditioning, running error.

Bound arithmetic runs in fp64 regardless of the precision mode under
analysis; the machine epsilon entering each bound is that of the analysed
mode (2^-24 for fp32 and mixed working precision, 2^-53 for fp64).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .engine import ConvConfig, EvalLeaf, EvalTree, row_trees, tree_depth
from .exact import is_power_of_two, is_representable, to_nearest_float
from .transforms import TransformSet

EPSILON = {"fp32": 2.0 ** -24, "fp64": 2.0 ** -53, "mixed": 2.0 ** -24}

ELEMENT_CLASSES = ("general", "exact", "power_of_two")

# Extra per-product error terms in the dot-product model: representation and
# multiplication errors both vanish for powers of two, representation error
# vanishes for exactly representable coefficients.
_MULT_TERM = {"general": 2, "exact": 1, "power_of_two": 0}


def classify_entry(value: Fraction, precision: str = "fp32") -> str:
    if is_power_of_two(value):
        return "power_of_two"
    if is_representable(value, precision):
        return "exact"
    return "general"


def classify_matrix(ts: TransformSet, name: str, precision: str = "fp32") -> str:
    """Weakest element class among the nonzero entries of one matrix."""
    worst = "power_of_two"
    rank = {"power_of_two": 0, "exact": 1, "general": 2}
    for row in ts.matrix(name):
        for v in row:
            if v == 0:
                continue
            c = classify_entry(v, precision)
            if rank[c] > rank[worst]:
                worst = c
    return worst


@dataclass(frozen=True)
class SummationConstants:
    """Dot-product error constants for the three transform matrices."""

    alpha: float
    beta: float
    gamma: float
    method: str
    element_class: dict

    @property
    def factor_1d(self) -> float:
        return self.alpha + self.beta + self.gamma + 1.0

    @property
    def factor_2d(self) -> float:
        return 2.0 * (self.alpha + self.beta + self.gamma) + 1.0


def _as_class_map(element_class) -> dict:
    if isinstance(element_class, dict):
        m = dict(element_class)
    else:
        m = {name: element_class for name in ("A_T", "B_T", "G")}
    for name, c in m.items():
        if c not in ELEMENT_CLASSES:
            raise ValueError(f"unknown element class {c!r} for {name}")
    return m


def summation_constants(method: str, n: int, n_h: int,
                        element_class="general",
                        trees: dict | None = None) -> SummationConstants:
    """Error constants alpha(n), beta(n), gamma(n_h) for a summation method.

    linear: n-1 additions plus the per-element multiplication term, giving
    the classic n+1 / n / n-1 pattern.  huffman: the maximal tree depth over
    the matrix rows plus the multiplication term; requires the trees.
    """
    if n < 1 or n_h < 1:
        raise ValueError("sizes must be >= 1")
    classes = _as_class_map(element_class)
    if method == "linear":
        alpha = (n - 1) + _MULT_TERM[classes["A_T"]]
        beta = (n - 1) + _MULT_TERM[classes["B_T"]]
        gamma = (n_h - 1) + _MULT_TERM[classes["G"]]
    elif method == "huffman":
        if trees is None:
            raise ValueError("huffman constants require the evaluation trees")

        def max_depth(name):
            ds = [tree_depth(t) for t in trees[name] if t is not None]
            return max(ds) if ds else 0

        alpha = max_depth("A_T") + _MULT_TERM[classes["A_T"]]
        beta = max_depth("B_T") + _MULT_TERM[classes["B_T"]]
        gamma = max_depth("G") + _MULT_TERM[classes["G"]]
    else:
        raise ValueError(f"unknown summation method {method!r}")
    return SummationConstants(float(alpha), float(beta), float(gamma),
                              method, classes)


def constants_for(ts: TransformSet, method: str = "huffman",
                  precision: str = "fp32",
                  element_class="auto") -> SummationConstants:
    """Constants for a concrete transform set, auto-classifying its entries."""
    if element_class == "auto":
        element_class = {name: classify_matrix(ts, name, precision)
                         for name in ("A_T", "B_T", "G")}
    trees = None
    if method == "huffman":
        trees = {name: row_trees(ts, name, "huffman")
                 for name in ("A_T", "B_T", "G")}
    return summation_constants(method, ts.n, ts.n_h, element_class, trees)


# -- norms ---------------------------------------------------------------------


def matrix_norms(m) -> dict:
    """||M||_1 = max column absolute sum, and the Frobenius norm, in fp64."""
    a = np.asarray(m, dtype=np.float64)
    return {
        "one_norm": float(np.abs(a).sum(axis=0).max()),
        "frobenius": float(math.sqrt((a * a).sum())),
    }


def _l2(v: np.ndarray, axes: int) -> np.ndarray:
    sq = v * v
    for _ in range(axes):
        sq = sq.sum(axis=-1)
    return np.sqrt(sq)


# -- bound reports ---------------------------------------------------------------


@dataclass
class BoundReport:
    """First-order worst-case bound with its constituents, for auditability."""

    normwise_bound: np.ndarray | float
    componentwise_bounds: np.ndarray | None
    epsilon: float
    factor: float
    norms: dict
    lam: float | None = None
    channels: int = 1

    def to_json_dict(self) -> dict:
        def plain(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            return float(v) if v is not None else None

        return {
            "normwise_bound": plain(self.normwise_bound),
            "componentwise_bounds": plain(self.componentwise_bounds),
            "epsilon": self.epsilon,
            "factor": self.factor,
            "lambda": self.lam,
            "channels": self.channels,
            "norms": {k: float(v) for k, v in self.norms.items()},
        }

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
            fh.write("\n")


def _abs_matrices(ts: TransformSet):
    at = np.abs(ts.matrix_fp("A_T", "fp64"))
    g = np.abs(ts.matrix_fp("G", "fp64"))
    bt = np.abs(ts.matrix_fp("B_T", "fp64"))
    return at, g, bt


def _norm_set(ts: TransformSet) -> dict:
    at = ts.matrix_fp("A_T", "fp64")
    g = ts.matrix_fp("G", "fp64")
    bt = ts.matrix_fp("B_T", "fp64")
    return {
        "A_T_one": matrix_norms(at)["one_norm"],
        "A_one": matrix_norms(at.T)["one_norm"],
        "G_fro": matrix_norms(g)["frobenius"],
        "B_T_fro": matrix_norms(bt)["frobenius"],
    }


def bound_1d(ts: TransformSet, h, x, consts: SummationConstants,
             precision: str = "fp32") -> BoundReport:
    """Theorem-style 1D bound.  h: (..., n_h), x: (..., n), single channel.

    normwise: ||A^T||_1 ||G||_F ||h||_2 ||B^T||_F ||x||_2 (a+b+g+1) eps;
    componentwise: |A^T|(|G||h| o |B^T||x|) (a+b+g+1) eps.
    """
    eps = EPSILON[precision]
    at, g, bt = _abs_matrices(ts)
    habs = np.abs(np.asarray(h, dtype=np.float64))
    xabs = np.abs(np.asarray(x, dtype=np.float64))
    factor = consts.factor_1d
    gh = habs @ g.T
    bx = xabs @ bt.T
    comp = ((gh * bx) @ at.T) * (factor * eps)
    norms = _norm_set(ts)
    normwise = (norms["A_T_one"] * norms["G_fro"] * norms["B_T_fro"]
                * _l2(habs, 1) * _l2(xabs, 1) * factor * eps)
    return BoundReport(normwise, comp, eps, factor, norms)


def bound_2d(ts: TransformSet, h, x, consts: SummationConstants,
             precision: str = "fp32") -> BoundReport:
    """Theorem-style 2D bound with factor 2a+2b+2g+1."""
    eps = EPSILON[precision]
    at, g, bt = _abs_matrices(ts)
    habs = np.abs(np.asarray(h, dtype=np.float64))
    xabs = np.abs(np.asarray(x, dtype=np.float64))
    factor = consts.factor_2d
    u = g @ habs @ g.T
    v = bt @ xabs @ bt.T
    comp = (at @ (u * v) @ at.T) * (factor * eps)
    norms = _norm_set(ts)
    normwise = (norms["A_T_one"] * norms["A_one"]
                * norms["G_fro"] ** 2 * norms["B_T_fro"] ** 2
                * _l2(habs, 2) * _l2(xabs, 2) * factor * eps)
    return BoundReport(normwise, comp, eps, factor, norms)


def channel_lambda(channels: int, channel_sum: str) -> float:
    """Pointwise channel-summation term: C for linear accumulation,
    floor(log2 C) + 2 for pairwise summation."""
    if channels < 1:
        raise ValueError("channels must be >= 1")
    if channel_sum == "linear":
        return float(channels)
    if channel_sum == "pairwise":
        return float(math.floor(math.log2(channels)) + 2)
    raise ValueError(f"unknown channel_sum {channel_sum!r}")


def bound_multichannel(ts: TransformSet, channels: int, dims: int,
                       channel_sum: str, consts: SummationConstants,
                       h=None, x=None, precision: str = "fp32") -> BoundReport:
    """Multi-channel corollary bound: R gains lambda(C) in place of the
    single-channel tail. Without tensors the input norms are taken as 1;
    with tensors (channel-stacked) the Frobenius norms over all channels
    enter the normwise bound."""
    eps = EPSILON[precision]
    lam = channel_lambda(channels, channel_sum)
    base = (consts.alpha + consts.beta + consts.gamma if dims == 1
            else 2.0 * (consts.alpha + consts.beta + consts.gamma))
    factor = base + lam
    norms = _norm_set(ts)
    if dims == 1:
        matrix_part = norms["A_T_one"] * norms["G_fro"] * norms["B_T_fro"]
    else:
        matrix_part = (norms["A_T_one"] * norms["A_one"]
                       * norms["G_fro"] ** 2 * norms["B_T_fro"] ** 2)
    comp = None
    if h is not None and x is not None:
        at, g, bt = _abs_matrices(ts)
        habs = np.abs(np.asarray(h, dtype=np.float64))
        xabs = np.abs(np.asarray(x, dtype=np.float64))
        h_f = _l2(habs, dims + 1)
        x_f = _l2(xabs, dims + 1)
        if dims == 1:
            had = ((habs @ g.T) * (xabs @ bt.T)).sum(axis=-2)
            comp = (had @ at.T) * (factor * eps)
        else:
            u = g @ habs @ g.T
            v = bt @ xabs @ bt.T
            had = (u * v).sum(axis=-3)
            comp = (at @ had @ at.T) * (factor * eps)
        normwise = matrix_part * h_f * x_f * factor * eps
    else:
        normwise = matrix_part * factor * eps
    return BoundReport(normwise, comp, eps, factor, norms, lam=lam,
                       channels=channels)


def bound_modified_last_output(ts: TransformSet, h, x,
                               element_class="auto",
                               precision: str = "fp32") -> float:
    """Componentwise bound for the last output of the modified algorithm.

    Literal max of the two dot-product branches; for n_h >= 3 the first
    branch always dominates and the corollary form (factor a'+b'+g'+1,
    i.e. n_h+2n+2 for linear/general) applies.  Linear-summation constants.
    """
    if not ts.modified:
        raise ValueError("last-output bound applies to the modified triple")
    eps = EPSILON[precision]
    n, n_h, n_o = ts.n, ts.n_h, ts.n_o
    if element_class == "auto":
        classes = {name: classify_matrix(ts, name, precision)
                   for name in ("A_T", "B_T", "G")}
    else:
        classes = _as_class_map(element_class)
    sub = summation_constants("linear", n - 1, n_h, classes)
    beta_full = (n - 1) + _MULT_TERM[classes["B_T"]]
    branch1 = sub.gamma + sub.beta + sub.alpha + 1
    if n_h >= 3:
        factor = branch1
    else:
        factor = max(branch1, beta_full + 1) + 1
    at, g, bt = _abs_matrices(ts)
    habs = np.abs(np.asarray(h, dtype=np.float64))
    xabs = np.abs(np.asarray(x, dtype=np.float64))
    a_row = at[n_o - 1, : n - 1]
    term1 = (g[: n - 1] @ habs) * (bt[: n - 1, : n - 1] @ xabs[: n - 1])
    term2 = habs[n_h - 1] * (bt[n - 1] @ xabs)
    return float((a_row @ term1 + term2) * factor * eps)


# -- Khatri-Rao product and conditioning ------------------------------------------


def khatri_rao_rowwise(b_t, g) -> np.ndarray:
    """Row-wise (blockwise Kronecker) product: row i is kron(B^T_i, G_i)."""
    bt = np.asarray(b_t)
    gm = np.asarray(g)
    if bt.shape[0] != gm.shape[0]:
        raise ValueError("row counts disagree")
    return np.stack([np.kron(bt[i], gm[i]) for i in range(bt.shape[0])])


def jacobi_singular_values(m, tol: float = 1e-12,
                           max_sweeps: int = 60) -> np.ndarray:
    """Singular values by one-sided Jacobi column orthogonalisation in fp64."""
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("need a 2-D matrix")
    if a.shape[0] < a.shape[1]:
        a = a.T.copy()
    cols = a.shape[1]
    for _ in range(max_sweeps):
        rotated = False
        for i in range(cols - 1):
            for j in range(i + 1, cols):
                ai, aj = a[:, i], a[:, j]
                aii = float(ai @ ai)
                ajj = float(aj @ aj)
                aij = float(ai @ aj)
                if aii == 0.0 or ajj == 0.0:
                    continue
                if abs(aij) <= tol * math.sqrt(aii * ajj):
                    continue
                rotated = True
                tau = (ajj - aii) / (2.0 * aij)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                vi = c * ai - s * aj
                vj = s * ai + c * aj
                a[:, i], a[:, j] = vi, vj
        if not rotated:
            break
    sv = np.sqrt((a * a).sum(axis=0))
    sv.sort()
    return sv[::-1]


@dataclass
class ConditionEstimate:
    kappa: float
    bound: float
    singular: bool
    note: str = ""


def condition_bound(ts: TransformSet, h, x) -> ConditionEstimate:
    """Upper bound sqrt(n_o n n_h) max{||x||_1, ||h||_1} k2(A^T (B^T kr G)),
    using the untrimmed square system behind A^T."""
    at_sq = np.array([[float(to_nearest_float(v, "fp64")) for v in row]
                      for row in ts.square_a_t()])
    g = ts.matrix_fp("G", "fp64")
    bt = ts.matrix_fp("B_T", "fp64")
    m = at_sq @ khatri_rao_rowwise(bt, g)
    sv = jacobi_singular_values(m)
    habs = np.abs(np.asarray(h, dtype=np.float64))
    xabs = np.abs(np.asarray(x, dtype=np.float64))
    scale = math.sqrt(ts.n_o * ts.n * ts.n_h) * max(habs.sum(), xabs.sum())
    if sv[-1] <= 0.0 or not np.isfinite(sv[-1]) or sv[-1] < sv[0] * 1e-290:
        return ConditionEstimate(math.inf, math.inf, True,
                                 "numerically singular Khatri-Rao system")
    kappa = float(sv[0] / sv[-1])
    return ConditionEstimate(kappa, scale * kappa, False)


# -- running error -----------------------------------------------------------------


def _leaf_mult_term(coeff: Fraction, precision: str) -> float:
    return float(_MULT_TERM[classify_entry(coeff, precision)])


def _running_dot(tree: EvalTree, take_val, take_mu, precision: str, cast):
    """Higham running-error accumulation for one dot product: every addition
    contributes the magnitude of its computed partial sum, every product by
    an inexact coefficient its representation/multiplication terms; carried
    input weights scale by |coefficient|."""
    if tree is None:
        z = np.zeros_like(take_val(0))
        return z, np.zeros_like(z, dtype=np.float64)
    if isinstance(tree, EvalLeaf):
        c = cast(tree.coeff)
        val = c * take_val(tree.col)
        mu = _leaf_mult_term(tree.coeff, precision) * np.abs(val).astype(np.float64)
        if take_mu is not None:
            mu = mu + abs(float(c)) * take_mu(tree.col)
        return val, mu
    lv, lmu = _running_dot(tree.left, take_val, take_mu, precision, cast)
    rv, rmu = _running_dot(tree.right, take_val, take_mu, precision, cast)
    val = lv + rv
    return val, lmu + rmu + np.abs(val).astype(np.float64)


def running_error_1d(ts: TransformSet, h, x, cfg: ConvConfig = ConvConfig()):
    """Running error for the 1D pipeline, accumulated alongside execution.

    This is a partial first-order bound built from actual intermediate
    magnitudes: each Hadamard product, each
    channel-summation add, and every operation of the output transform
    contributes the magnitude of its computed result (inexact coefficients
    add their representation/multiplication terms).  Kernel- and input-
    transform roundings are not tracked, which is why the bound is expected
    to dominate the true error in nearly all trials rather than all of them.
    Returns (outputs, eps * mu) per output element.
    """
    from .engine import _channelled, _coefficient_cast, hadamard_1d

    eps = EPSILON[cfg.precision]
    class_precision = "fp64" if cfg.precision == "fp64" else "fp32"
    cast = _coefficient_cast(cfg.precision)
    h = _channelled(h, 1, "kernel", ts.n_h)
    x = _channelled(x, 1, "input", ts.n)

    z = hadamard_1d(ts, h, x, cfg)
    mu_z = np.abs(z).astype(np.float64)  # one rounding per Hadamard product

    zc = np.moveaxis(z, -2, 0)
    mc = np.moveaxis(mu_z, -2, 0)
    if zc.shape[0] == 1:
        y, mu_y = zc[0], mc[0]
    elif cfg.channel_sum == "linear":
        y, mu_y = zc[0], mc[0]
        for c in range(1, zc.shape[0]):
            y = y + zc[c]
            mu_y = mu_y + mc[c] + np.abs(y).astype(np.float64)
    else:
        vals, mus = list(zc), list(mc)
        while len(vals) > 1:
            nv, nm = [], []
            for i in range(0, len(vals) - 1, 2):
                s = vals[i] + vals[i + 1]
                nv.append(s)
                nm.append(mus[i] + mus[i + 1] + np.abs(s).astype(np.float64))
            if len(vals) % 2:
                nv.append(vals[-1])
                nm.append(mus[-1])
            vals, mus = nv, nm
        y, mu_y = vals[0], mus[0]

    if cfg.precision == "mixed":
        y = y.astype(np.float64)

    outs, bounds = [], []
    for tree in row_trees(ts, "A_T", cfg.dot_order):
        val, mu = _running_dot(tree, lambda j: y[..., j],
                               lambda j: mu_y[..., j], class_precision, cast)
        outs.append(val)
        bounds.append(mu)
    return np.stack(outs, axis=-1), np.stack(bounds, axis=-1) * eps
