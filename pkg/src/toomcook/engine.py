"""Convolution execution with controlled precision and summation order.

Every floating-point multiply and add in the transform pipeline is issued as
one elementwise numpy operation, so each rounds individually (no FMA, no
reassociation) while arbitrary leading batch axes stay vectorised.  Dot
products follow either left-to-right order or a per-row Huffman tree built at
transform-construction time from the exact coefficient magnitudes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exact import Fraction as Rational
from .exact import to_nearest_float
from .transforms import TransformSet

PRECISION_MODES = ("fp32", "fp64", "mixed")
DOT_ORDERS = ("linear", "huffman")
CHANNEL_SUMS = ("linear", "pairwise")


@dataclass(frozen=True)
class ConvConfig:
    """Precision mode plus summation strategies for one convolution run.

    mixed mode: transform arithmetic in fp64 over the fp32-rounded constant
    tables, Hadamard product and channel summation in fp32 (with round-to-
    nearest narrowing of the transform outputs), final output transform in
    fp64 whose result is returned in fp64.
    """

    precision: str = "fp32"
    dot_order: str = "huffman"
    channel_sum: str = "linear"

    def __post_init__(self):
        if self.precision not in PRECISION_MODES:
            raise ValueError(f"precision must be one of {PRECISION_MODES}")
        if self.dot_order not in DOT_ORDERS:
            raise ValueError(f"dot_order must be one of {DOT_ORDERS}")
        if self.channel_sum not in CHANNEL_SUMS:
            raise ValueError(f"channel_sum must be one of {CHANNEL_SUMS}")

    @property
    def transform_dtype(self):
        return np.float64 if self.precision in ("fp64", "mixed") else np.float32

    @property
    def working_dtype(self):
        return np.float64 if self.precision == "fp64" else np.float32


# -- Huffman evaluation trees -------------------------------------------------


@dataclass(frozen=True)
class EvalLeaf:
    col: int
    coeff: Rational


@dataclass(frozen=True)
class EvalNode:
    left: "EvalTree"
    right: "EvalTree"


EvalTree = EvalLeaf | EvalNode | None


def huffman_order(row: Sequence, tie_keys: Sequence | None = None) -> EvalTree:
    """Huffman tree over |coefficient| weights; zero coefficients are dropped
    (they contribute no operation).  Ties break deterministically: leaves
    before internal nodes, then by the column tie key (column index unless a
    permutation-invariant key is supplied), then by creation order.
    """
    leaves = [(j, Rational(c)) for j, c in enumerate(row) if Rational(c) != 0]
    if not leaves:
        return None
    heap = []
    for j, c in leaves:
        key = tie_keys[j] if tie_keys is not None else j
        heapq.heappush(heap, (abs(c), 0, key, EvalLeaf(j, c)))
    counter = 0
    while len(heap) > 1:
        w1, _, _, n1 = heapq.heappop(heap)
        w2, _, _, n2 = heapq.heappop(heap)
        heapq.heappush(heap, (w1 + w2, 1, counter, EvalNode(n1, n2)))
        counter += 1
    return heap[0][3]


def linear_order(row: Sequence) -> EvalTree:
    """Left-to-right accumulation over nonzero coefficients, as a left-deep
    tree (the stored-point-order baseline)."""
    tree: EvalTree = None
    for j, c in enumerate(row):
        c = Rational(c)
        if c == 0:
            continue
        leaf = EvalLeaf(j, c)
        tree = leaf if tree is None else EvalNode(tree, leaf)
    return tree


def tree_depth(tree: EvalTree) -> int:
    """Number of additions on the deepest root-to-leaf path."""
    if tree is None or isinstance(tree, EvalLeaf):
        return 0
    return 1 + max(tree_depth(tree.left), tree_depth(tree.right))


def tree_leaves(tree: EvalTree):
    if tree is None:
        return
    if isinstance(tree, EvalLeaf):
        yield tree
        return
    yield from tree_leaves(tree.left)
    yield from tree_leaves(tree.right)


def row_trees(ts: TransformSet, matrix: str, order: str) -> list[EvalTree]:
    """Per-row evaluation trees for one transform matrix, cached on the set.

    A^T columns are indexed by interpolation points, so their Huffman ties
    break on the canonical point key; results are then bitwise invariant
    under permutations of the point set.
    """
    key = ("trees", matrix, order)
    if key not in ts._programs:
        rows = ts.matrix(matrix)
        if order == "huffman":
            tie_keys = None
            if matrix == "A_T":
                tie_keys = [p.sort_key() for p in ts.points]
            trees = [huffman_order(row, tie_keys) for row in rows]
        elif order == "linear":
            trees = [linear_order(row) for row in rows]
        else:
            raise ValueError(f"unknown dot order {order!r}")
        ts._programs[key] = trees
    return ts._programs[key]


# -- compiled numeric programs -------------------------------------------------

# Compiled forms: ("linear", ((col, coeff), ...)) evaluated by accumulator
# loop, or ("tree", node) with node = (0, col, coeff) | (1, left, right).


def _compile_tree(tree: EvalTree, cast):
    if isinstance(tree, EvalLeaf):
        return (0, tree.col, cast(tree.coeff))
    return (1, _compile_tree(tree.left, cast), _compile_tree(tree.right, cast))


def _coefficient_cast(precision: str):
    if precision == "fp32":
        return lambda c: to_nearest_float(c, "fp32")
    if precision == "fp64":
        return lambda c: to_nearest_float(c, "fp64")
    if precision == "mixed":
        # fp64 transform arithmetic over the fp32-stored constant tables
        return lambda c: np.float64(to_nearest_float(c, "fp32"))
    raise ValueError(f"unknown precision {precision!r}")


def compiled_programs(ts: TransformSet, matrix: str, order: str,
                      precision: str) -> list:
    key = ("compiled", matrix, order, precision)
    if key not in ts._programs:
        cast = _coefficient_cast(precision)
        progs = []
        if order == "linear":
            for row in ts.matrix(matrix):
                ops = tuple((j, cast(c)) for j, c in enumerate(row) if c != 0)
                progs.append(("linear", ops))
        else:
            for tree in row_trees(ts, matrix, order):
                progs.append(("tree", _compile_tree(tree, cast) if tree else None))
        ts._programs[key] = progs
    return ts._programs[key]


def _eval_tree_node(node, take):
    if node[0] == 0:
        return node[2] * take(node[1])
    return _eval_tree_node(node[1], take) + _eval_tree_node(node[2], take)


def _eval_program(prog, take):
    if prog[0] == "linear":
        ops = prog[1]
        if not ops:
            return None
        col, c = ops[0]
        acc = c * take(col)
        for col, c in ops[1:]:
            acc = acc + c * take(col)
        return acc
    node = prog[1]
    return None if node is None else _eval_tree_node(node, take)


def _apply(progs, take: Callable[[int], np.ndarray], stack_axis: int,
           sample: np.ndarray) -> np.ndarray:
    outs = []
    for p in progs:
        r = _eval_program(p, take)
        outs.append(np.zeros_like(sample) if r is None else r)
    return np.stack(outs, axis=stack_axis)


def _apply_vec(progs, data):
    """(..., n) -> (..., r)"""
    return _apply(progs, lambda j: data[..., j], -1, data[..., 0])


def _apply_left(progs, data):
    """(..., n, k) -> (..., r, k): rows of the matrix against axis -2."""
    return _apply(progs, lambda j: data[..., j, :], -2, data[..., 0, :])


def _apply_right(progs, data):
    """(..., k, n) -> (..., k, r): multiply by the matrix transpose."""
    return _apply(progs, lambda j: data[..., :, j], -1, data[..., :, 0])


def dot_with_order(tree: EvalTree, vector, precision: str = "fp64"):
    """Evaluate one dot product following the tree's summation order.

    Products form at the leaves, additions follow the tree structure, every
    operation in the stated precision.  An empty tree yields exact zero.
    """
    dtype = np.float32 if precision == "fp32" else np.float64
    v = np.asarray(vector).astype(dtype)
    if tree is None:
        return dtype(0.0)
    node = _compile_tree(tree, lambda c: to_nearest_float(c, precision))
    return _eval_tree_node(node, lambda j: v[..., j])


# -- channel reduction ---------------------------------------------------------


def _reduce_linear(stacked: np.ndarray) -> np.ndarray:
    acc = stacked[0]
    for c in range(1, stacked.shape[0]):
        acc = acc + stacked[c]
    return acc


def _reduce_pairwise(stacked: np.ndarray) -> np.ndarray:
    b = stacked
    while b.shape[0] > 1:
        half = b.shape[0] // 2
        s = b[0:2 * half:2] + b[1:2 * half:2]
        if b.shape[0] % 2:
            s = np.concatenate([s, b[2 * half:]], axis=0)
        b = s
    return b[0]


def _reduce_channels(data: np.ndarray, axis: int, strategy: str) -> np.ndarray:
    b = np.moveaxis(data, axis, 0)
    if b.shape[0] == 1:
        return b[0]
    if strategy == "linear":
        return _reduce_linear(b)
    if strategy == "pairwise":
        return _reduce_pairwise(b)
    raise ValueError(f"unknown channel_sum {strategy!r}")


def pairwise_sum(values, precision: str = "fp32"):
    """Balanced binary recursive summation of a nonempty list of scalars."""
    dtype = np.float32 if precision in ("fp32", "mixed") else np.float64
    arr = np.asarray(values).astype(dtype)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("pairwise_sum expects a nonempty 1-D list")
    return _reduce_pairwise(arr)


# -- shape handling -------------------------------------------------------------


def _channelled(a, dims: int, name: str, size: int | None = None) -> np.ndarray:
    arr = np.asarray(a)
    if arr.ndim < dims:
        raise ValueError(f"{name} needs at least {dims} axes")
    if arr.ndim == dims:
        arr = arr[np.newaxis]
    if size is not None and arr.shape[-1] != size:
        raise ValueError(f"{name} last axis is {arr.shape[-1]}, expected {size}")
    if dims == 2 and arr.shape[-1] != arr.shape[-2]:
        raise ValueError(f"{name} must be square in its trailing axes")
    return arr


# -- direct convolution ---------------------------------------------------------


def direct_products(h, x, dims: int = 1, precision: str = "fp64") -> np.ndarray:
    """Per-channel valid-region correlation, before any channel summation.

    Accumulates tap by tap in kernel-index order; result (..., C, out...).
    """
    wd = np.float64 if precision == "fp64" else np.float32
    h = _channelled(h, dims, "kernel").astype(wd)
    x = _channelled(x, dims, "input").astype(wd)
    if h.shape[:-dims] != x.shape[:-dims]:
        raise ValueError("kernel/input channel or batch shapes disagree")
    n_h = h.shape[-1]
    n_o = x.shape[-1] - n_h + 1
    if n_o < 1:
        raise ValueError("input shorter than kernel")
    acc = None
    if dims == 1:
        for j in range(n_h):
            term = h[..., j:j + 1] * x[..., j:j + n_o]
            acc = term if acc is None else acc + term
        return acc
    for k in range(n_h):
        for l in range(n_h):
            term = h[..., k:k + 1, l:l + 1] * x[..., k:k + n_o, l:l + n_o]
            acc = term if acc is None else acc + term
    return acc


def channel_reduce(z: np.ndarray, dims: int, strategy: str) -> np.ndarray:
    """Pointwise channel summation of (..., C, out...) data."""
    return _reduce_channels(z, -(dims + 1), strategy)


def conv_direct(h, x, dims: int = 1, precision: str = "fp64",
                channel_sum: str = "linear") -> np.ndarray:
    """Valid-region correlation (the DNN convention), channel results summed
    pointwise."""
    return channel_reduce(direct_products(h, x, dims, precision), dims,
                          channel_sum)


# -- Toom-Cook execution ---------------------------------------------------------


def _transform_label(cfg: ConvConfig) -> str:
    return cfg.precision


def _prepare_input(arr: np.ndarray, cfg: ConvConfig) -> np.ndarray:
    # mixed mode accepts fp32 inputs and widens them for the transforms
    if cfg.precision == "mixed":
        return arr.astype(np.float32).astype(np.float64)
    return arr.astype(cfg.transform_dtype)


def hadamard_1d(ts: TransformSet, h, x, cfg: ConvConfig) -> np.ndarray:
    """Transform stage plus Hadamard product: (..., C, n) per channel."""
    h = _channelled(h, 1, "kernel", ts.n_h)
    x = _channelled(x, 1, "input", ts.n)
    if h.shape[:-1] != x.shape[:-1]:
        raise ValueError("kernel/input channel or batch shapes disagree")
    label = _transform_label(cfg)
    hw, xw = _prepare_input(h, cfg), _prepare_input(x, cfg)
    u = _apply_vec(compiled_programs(ts, "G", cfg.dot_order, label), hw)
    v = _apply_vec(compiled_programs(ts, "B_T", cfg.dot_order, label), xw)
    if cfg.precision == "mixed":
        u, v = u.astype(np.float32), v.astype(np.float32)
    return u * v


def output_1d(ts: TransformSet, y: np.ndarray, cfg: ConvConfig) -> np.ndarray:
    """Output transform over the channel-summed Hadamard vector.

    In mixed mode this is the fp64 post-processing transform; its result is
    returned in fp64 (narrowing it would mask the gain at small sizes).
    """
    label = _transform_label(cfg)
    if cfg.precision == "mixed":
        y = y.astype(np.float64)
    return _apply_vec(compiled_programs(ts, "A_T", cfg.dot_order, label), y)


def conv_1d(ts: TransformSet, h, x, cfg: ConvConfig = ConvConfig()) -> np.ndarray:
    """1D multi-channel convolution through the transform triple.

    Hadamard products are summed across channels before the single output
    transform.  Inputs: kernel (..., C, n_h), input (..., C, n); the channel
    axis may be omitted when C = 1.  Output: (..., n_o).
    """
    z = hadamard_1d(ts, h, x, cfg)
    return output_1d(ts, channel_reduce(z, 1, cfg.channel_sum), cfg)


def hadamard_2d(ts: TransformSet, h, x, cfg: ConvConfig) -> np.ndarray:
    """GH_cG^T o B^TX_cB per channel: (..., C, n, n)."""
    h = _channelled(h, 2, "kernel", ts.n_h)
    x = _channelled(x, 2, "input", ts.n)
    if h.shape[:-2] != x.shape[:-2]:
        raise ValueError("kernel/input channel or batch shapes disagree")
    label = _transform_label(cfg)
    hw, xw = _prepare_input(h, cfg), _prepare_input(x, cfg)
    g_p = compiled_programs(ts, "G", cfg.dot_order, label)
    b_p = compiled_programs(ts, "B_T", cfg.dot_order, label)
    u = _apply_right(g_p, _apply_left(g_p, hw))
    v = _apply_right(b_p, _apply_left(b_p, xw))
    if cfg.precision == "mixed":
        u, v = u.astype(np.float32), v.astype(np.float32)
    return u * v


def output_2d(ts: TransformSet, y: np.ndarray, cfg: ConvConfig) -> np.ndarray:
    label = _transform_label(cfg)
    if cfg.precision == "mixed":
        y = y.astype(np.float64)
    a_p = compiled_programs(ts, "A_T", cfg.dot_order, label)
    return _apply_right(a_p, _apply_left(a_p, y))


def conv_2d(ts: TransformSet, h, x, cfg: ConvConfig = ConvConfig()) -> np.ndarray:
    """2D multi-channel convolution: A^T(sum_c GH_cG^T o B^TX_cB)A."""
    z = hadamard_2d(ts, h, x, cfg)
    return output_2d(ts, channel_reduce(z, 2, cfg.channel_sum), cfg)


# -- exact-arithmetic pipeline ---------------------------------------------------


def _frac_matvec(m: Sequence[Sequence[Rational]], v: Sequence[Rational]):
    return [sum((mij * vj for mij, vj in zip(row, v)), Rational(0)) for row in m]


def conv_direct_exact(h, x, dims: int = 1):
    """Valid-region correlation over exact rationals."""
    if dims == 1:
        h = [Rational(v) for v in h]
        x = [Rational(v) for v in x]
        n_o = len(x) - len(h) + 1
        return [sum((h[j] * x[q + j] for j in range(len(h))), Rational(0))
                for q in range(n_o)]
    h = [[Rational(v) for v in row] for row in h]
    x = [[Rational(v) for v in row] for row in x]
    n_h, n_o = len(h), len(x) - len(h) + 1
    return [[sum((h[k][l] * x[q + k][r + l]
                  for k in range(n_h) for l in range(n_h)), Rational(0))
             for r in range(n_o)] for q in range(n_o)]


def conv_1d_exact(ts: TransformSet, h, x):
    """Full pipeline in exact rational arithmetic; must equal conv_direct_exact."""
    h = [Rational(v) for v in h]
    x = [Rational(v) for v in x]
    u = _frac_matvec(ts.matrix("G"), h)
    v = _frac_matvec(ts.matrix("B_T"), x)
    z = [ui * vi for ui, vi in zip(u, v)]
    return _frac_matvec(ts.matrix("A_T"), z)


def conv_2d_exact(ts: TransformSet, h, x):
    def matmat(m, b):
        return [[sum((m[i][k] * b[k][j] for k in range(len(b))), Rational(0))
                 for j in range(len(b[0]))] for i in range(len(m))]

    def transpose(m):
        return [list(col) for col in zip(*m)]

    h = [[Rational(v) for v in row] for row in h]
    x = [[Rational(v) for v in row] for row in x]
    g, bt, at = ts.matrix("G"), ts.matrix("B_T"), ts.matrix("A_T")
    u = matmat(matmat(g, h), transpose(g))
    v = matmat(matmat(bt, x), transpose(bt))
    z = [[ui * vi for ui, vi in zip(ur, vr)] for ur, vr in zip(u, v)]
    return matmat(matmat(at, z), transpose(at))


def _direct_int_1d(hs: np.ndarray, xs: np.ndarray, n_o: int) -> np.ndarray:
    rows = []
    for q in range(n_o):
        acc = hs[0] * xs[q]
        for j in range(1, hs.shape[0]):
            acc = acc + hs[j] * xs[q + j]
        rows.append(acc)
    return np.array(rows, dtype=object)


def _direct_int_2d(hm: np.ndarray, xm: np.ndarray, n_o: int) -> np.ndarray:
    n_h = hm.shape[0]
    out = np.empty((n_o, n_o), dtype=object)
    for q in range(n_o):
        for r in range(n_o):
            acc = 0
            for k in range(n_h):
                for l in range(n_h):
                    acc += hm[k, l] * xm[q + k, r + l]
            out[q, r] = acc
    return out


def check_exactness(ts: TransformSet, trials: int, seed: int = 0,
                    dims: int = 1, max_num: int = 30, max_den: int = 8) -> bool:
    """Exactness oracle: Toom-Cook output over exact rationals equals direct
    convolution for random rational kernel/input pairs.

    Denominators are cleared up front so the whole check runs on arbitrary-
    precision integers (components are random num/den rationals).
    """
    rng = np.random.default_rng(seed)
    a_int, da = ts.int_form("A_T")
    g_int, dg = ts.int_form("G")
    b_int, db = ts.int_form("B_T")
    scale = da * dg * db
    n_h, n, n_o = ts.n_h, ts.n, ts.n_o

    def draw(shape):
        # integer numerators over a random per-tensor denominator; the common
        # denominator cancels in the equality so only numerators matter
        return np.array(rng.integers(-max_num, max_num + 1, size=shape),
                        dtype=object)

    if dims == 1:
        hs = draw((n_h, trials))
        xs = draw((n, trials))
        lhs = a_int.dot(g_int.dot(hs) * b_int.dot(xs))
        rhs = _direct_int_1d(hs, xs, n_o) * scale
        return bool(np.all(lhs == rhs))
    for t in range(trials):
        hm = draw((n_h, n_h))
        xm = draw((n, n))
        u = g_int.dot(hm).dot(g_int.T)
        v = b_int.dot(xm).dot(b_int.T)
        lhs = a_int.dot(u * v).dot(a_int.T)
        rhs = _direct_int_2d(hm, xm, n_o) * (scale * scale)
        if not np.all(lhs == rhs):
            return False
    return True
