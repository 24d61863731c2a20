"""Monte-Carlo error measurement and reproductions of the reference tables.

Per trial, a fresh i.i.d. kernel and input are drawn uniform(-1, 1) in fp32
from a counter-based Philox stream keyed by (seed, trial index), so results
are deterministic and schedule-independent.  The error metric is the L1 norm
of the difference between the convolution under test and direct convolution
computed in fp64.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import pointsets
from .engine import (
    ConvConfig,
    channel_reduce,
    direct_products,
    hadamard_1d,
    hadamard_2d,
    output_1d,
    output_2d,
)
from .exact import INFINITY, Point, format_points
from .pointsets import (
    DIRECT_ERROR,
    KERNEL_SIZE,
    REFERENCE_CHANNEL_RATIO,
    REFERENCE_CHEBYSHEV_RATIO,
    REFERENCE_COMBINED_RATIO,
    REFERENCE_ERROR,
    REFERENCE_MIXED_RATIO,
    candidate_pool,
    curated_transform,
)
from .transforms import build_toom_cook, build_transforms, chebyshev_points, mult_count


@dataclass(frozen=True)
class DirectSpec:
    """Stands in for a TransformSet when measuring plain direct convolution."""

    n_h: int
    n_o: int

    @property
    def n(self) -> int:
        return self.n_h + self.n_o - 1

    def descriptor(self) -> dict:
        return {"direct": True, "n_h": self.n_h, "n_o": self.n_o, "n": self.n}


@dataclass
class ErrorReport:
    """Aggregate L1 error of one (transform, dims, config) experiment."""

    descriptor: dict
    dims: int
    channels: int
    config: dict
    trials: int
    seed: int
    total_l1_mean: float
    per_point_l1_mean: float
    n_outputs: int
    per_trial: np.ndarray | None = field(repr=False, default=None)

    def to_json_dict(self, include_trials: bool = False) -> dict:
        d = {
            "descriptor": self.descriptor,
            "dims": self.dims,
            "channels": self.channels,
            "config": self.config,
            "trials": self.trials,
            "seed": self.seed,
            "total_l1_mean": repr(self.total_l1_mean),
            "per_point_l1_mean": repr(self.per_point_l1_mean),
            "n_outputs": self.n_outputs,
        }
        if include_trials and self.per_trial is not None:
            d["per_trial"] = [repr(float(v)) for v in self.per_trial]
        return d

    def write_json(self, path, include_trials: bool = False) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(include_trials), fh, indent=1)
            fh.write("\n")


def trial_inputs(seed: int, trial: int, dims: int, n_h: int, n: int,
                 channels: int = 1):
    """The (kernel, input) pair of one trial: uniform(-1,1) fp32 draws from
    the Philox stream keyed by (seed, trial)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, trial], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    kshape = (channels,) + (n_h,) * dims
    xshape = (channels,) + (n,) * dims
    h = rng.random(kshape, dtype=np.float32) * np.float32(2) - np.float32(1)
    x = rng.random(xshape, dtype=np.float32) * np.float32(2) - np.float32(1)
    return h, x


def _chunk_size(trials: int, dims: int, n: int, channels: int) -> int:
    per_trial = channels * n ** dims
    budget = 2_000_000
    return max(1, min(trials, budget // max(per_trial, 1)))


def _measure_variants(spec, dims: int, cfg: ConvConfig, trials: int,
                      seed: int, channels: int,
                      variants: Sequence[str]) -> dict[str, ErrorReport]:
    """Measure one experiment for several channel-summation variants at once,
    sharing the transform work and the fp64 reference."""
    direct = isinstance(spec, DirectSpec)
    n_h, n_o, n = spec.n_h, spec.n_o, spec.n
    n_outputs = n_o ** dims
    per_trial = {v: np.empty(trials, dtype=np.float64) for v in variants}
    chunk = _chunk_size(trials, dims, n, channels)
    start = 0
    while start < trials:
        stop = min(trials, start + chunk)
        hs, xs = [], []
        for t in range(start, stop):
            h, x = trial_inputs(seed, t, dims, n_h, n, channels)
            hs.append(h)
            xs.append(x)
        hb = np.stack(hs)
        xb = np.stack(xs)
        ref = channel_reduce(direct_products(hb, xb, dims, "fp64"), dims,
                             "linear")
        if direct:
            prods = direct_products(hb, xb, dims,
                                    "fp64" if cfg.precision == "fp64" else "fp32")
            for v in variants:
                out = channel_reduce(prods, dims, v)
                diff = np.abs(out.astype(np.float64) - ref)
                per_trial[v][start:stop] = diff.reshape(stop - start, -1).sum(axis=1)
        else:
            z = (hadamard_1d if dims == 1 else hadamard_2d)(spec, hb, xb, cfg)
            out_fn = output_1d if dims == 1 else output_2d
            for v in variants:
                out = out_fn(spec, channel_reduce(z, dims, v), cfg)
                diff = np.abs(out.astype(np.float64) - ref)
                per_trial[v][start:stop] = diff.reshape(stop - start, -1).sum(axis=1)
        start = stop
    reports = {}
    for v in variants:
        total = float(per_trial[v].mean())
        reports[v] = ErrorReport(
            descriptor=spec.descriptor(),
            dims=dims,
            channels=channels,
            config={"precision": cfg.precision, "dot_order": cfg.dot_order,
                    "channel_sum": v},
            trials=trials,
            seed=seed,
            total_l1_mean=total,
            per_point_l1_mean=total / n_outputs,
            n_outputs=n_outputs,
            per_trial=per_trial[v],
        )
    return reports


def measure_error(spec, dims: int, cfg: ConvConfig = ConvConfig(),
                  trials: int = 5000, seed: int = 0,
                  channels: int = 1, keep_trials: bool = True) -> ErrorReport:
    """Monte-Carlo L1 error of Toom-Cook (or direct) convolution against the
    fp64 direct reference."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rep = _measure_variants(spec, dims, cfg, trials, seed, channels,
                            (cfg.channel_sum,))[cfg.channel_sum]
    if not keep_trials:
        rep.per_trial = None
    return rep


@dataclass(frozen=True)
class RatioStats:
    ratio: float
    ci_low: float | None
    ci_high: float | None


def compare_reports(a: ErrorReport, b: ErrorReport, n_boot: int = 1000,
                    boot_seed: int = 0) -> RatioStats:
    """Ratio of per-point means a/b with a bootstrap confidence interval."""
    if a.dims != b.dims or a.n_outputs != b.n_outputs or a.trials != b.trials:
        raise ValueError("reports come from mismatched experiments")
    ratio = a.per_point_l1_mean / b.per_point_l1_mean
    if a.per_trial is None or b.per_trial is None:
        return RatioStats(ratio, None, None)
    rng = np.random.default_rng(boot_seed)
    idx = rng.integers(0, a.trials, size=(n_boot, a.trials))
    ra = a.per_trial[idx].mean(axis=1)
    rb = b.per_trial[idx].mean(axis=1)
    boots = ra / rb
    lo, hi = np.percentile(boots, [2.5, 97.5])
    return RatioStats(ratio, float(lo), float(hi))


# -- point search -----------------------------------------------------------------


@dataclass
class SearchState:
    """Best-known point sets per (n, dims), plus the candidate pool."""

    pool: tuple[Fraction, ...]
    best: dict

    @classmethod
    def seeded(cls) -> "SearchState":
        base = pointsets.curated_points(4, 1)
        return cls(candidate_pool(), {(4, 1): base, (4, 2): base})

    @classmethod
    def seeded_with_curated(cls, family: str = "fp32") -> "SearchState":
        st = cls.seeded()
        for dims in (1, 2):
            for n in pointsets.SIZES:
                st.best[(n, dims)] = pointsets.curated_points(n, dims, family)
        return st


def candidate_sets(base: Sequence[Point], pool: Sequence[Fraction]) -> list[tuple[Point, ...]]:
    """Expansion moves from an (n-1)-point base to n-point candidates.

    Singles P u {p}; for even target n, drop an unpaired point and add a
    symmetric pair (p, -1/p) or (p, -p) of new pool points (the negation pair
    completes the negated-reciprocal symmetry with existing points).
    """
    finite = [p.value for p in base if not p.is_infinite]
    fin_set = set(finite)
    n_new = len(base) + 1
    seen = set()
    out: list[tuple[Point, ...]] = []

    def emit(values):
        key = frozenset(values)
        if key in seen:
            return
        seen.add(key)
        out.append(tuple(Point(v) for v in values) + (INFINITY,))

    for p in pool:
        if p not in fin_set:
            emit(finite + [p])
    if n_new % 2 == 0:
        unpaired = [q for q in finite
                    if q == 0 or Fraction(-1, 1) / q not in fin_set]
        for q in unpaired:
            rest = [v for v in finite if v != q]
            rest_set = set(rest)
            for p in pool:
                partners = {-p}
                if p != 0:
                    partners.add(Fraction(-1, 1) / p)
                for r in partners:
                    if p == r or p in rest_set or r in rest_set:
                        continue
                    emit(rest + [p, r])
    return out


@dataclass
class SearchResult:
    points: tuple[Point, ...]
    report: ErrorReport
    tie_with_first: bool = False


def search_points(n: int, dims: int, state: SearchState,
                  cfg: ConvConfig = ConvConfig(), trials: int = 5000,
                  seed: int = 0, n_h: int = KERNEL_SIZE,
                  n_boot: int = 500) -> list[SearchResult]:
    """Measure and rank all expansion candidates for size n.

    Candidates whose mean error is statistically indistinguishable from the
    leader (paired bootstrap interval of the difference covers 0) are marked
    as ties.  The winner is recorded back into the state.
    """
    if n < 4:
        raise ValueError("search starts from the seeded 4-point base")
    if n == 4:
        base = state.best[(4, dims)]
        ts = build_transforms(n_h, n - n_h + 1, base)
        rep = measure_error(ts, dims, cfg, trials, seed)
        return [SearchResult(base, rep, True)]
    base = state.best.get((n - 1, dims))
    if base is None:
        raise ValueError(f"no base point set for n={n - 1}, dims={dims}")
    results = []
    for cand in candidate_sets(base, state.pool):
        ts = build_transforms(n_h, n - n_h + 1, cand)
        rep = measure_error(ts, dims, cfg, trials, seed)
        results.append(SearchResult(cand, rep))
    results.sort(key=lambda r: r.report.per_point_l1_mean)
    lead = results[0].report.per_trial
    rng = np.random.default_rng(seed + 1)
    idx = rng.integers(0, trials, size=(n_boot, trials))
    for r in results:
        diff = r.report.per_trial - lead
        lo, hi = np.percentile(diff[idx].mean(axis=1), [2.5, 97.5])
        r.tie_with_first = bool(lo <= 0.0 <= hi)
    state.best[(n, dims)] = results[0].points
    return results


@dataclass
class ModifiedComparison:
    unmodified_median: float
    modified: float

    @property
    def reduction(self) -> float:
        return 1.0 - self.modified / self.unmodified_median


def modified_improvement(n: int, dims: int, family: str = "fp32",
                         trials: int = 2500, seed: int = 0) -> ModifiedComparison:
    """Error reduction from using the infinity pseudo-point.

    The all-finite comparator is the typical (median-error) completion of the
    curated set's finite points by one extra pool point; the modified side is
    the curated set itself, measured with the same budget and seed.
    """
    pts = pointsets.curated_points(n, dims, family)
    finite = tuple(p for p in pts if not p.is_infinite)
    fin_vals = {p.value for p in finite}
    cfg = ConvConfig()
    errs = []
    for q in candidate_pool():
        if q in fin_vals:
            continue
        ts = build_toom_cook(KERNEL_SIZE, n - KERNEL_SIZE + 1,
                             finite + (Point(q),))
        errs.append(measure_error(ts, dims, cfg, trials, seed,
                                  keep_trials=False).per_point_l1_mean)
    median = float(np.median(errs))
    mod = measure_error(curated_transform(n, dims, family), dims, cfg, trials,
                        seed, keep_trials=False).per_point_l1_mean
    return ModifiedComparison(median, mod)


# -- Chebyshev comparison and growth ------------------------------------------------


def compare_chebyshev(n_values: Sequence[int], dims: int,
                      cfg: ConvConfig = ConvConfig(), trials: int = 5000,
                      seed: int = 0, cache: dict | None = None) -> list[dict]:
    """Error of Chebyshev-node triples against the curated sets."""
    rows = []
    for n in n_values:
        if n < 4:
            raise ValueError("comparison starts at n = 4")
        cheb = build_toom_cook(KERNEL_SIZE, n - KERNEL_SIZE + 1,
                               chebyshev_points(n))
        rep_c = measure_error(cheb, dims, cfg, trials, seed, keep_trials=False)
        rep_g = _cached_report(cache, "fp32", dims, n, cfg, 1, trials, seed)
        ratio = rep_c.per_point_l1_mean / rep_g.per_point_l1_mean
        rows.append({
            "n": n,
            "curated_error": rep_g.per_point_l1_mean,
            "chebyshev_error": rep_c.per_point_l1_mean,
            "ratio": ratio,
            "reference_ratio": REFERENCE_CHEBYSHEV_RATIO[dims].get(n),
        })
    return rows


@dataclass
class GrowthStats:
    deltas: dict
    fit_c: float | None
    pairs: list


def growth_analysis(reports: Sequence[ErrorReport]) -> GrowthStats:
    """Per-size error growth (difference of log errors between consecutive
    sizes) and the quadratic 2D-vs-1D fit y = x^2 / c over errors normalised
    by the direct-convolution baseline."""
    by_dims: dict[int, dict[int, float]] = {1: {}, 2: {}}
    direct: dict[int, float] = {}
    for rep in reports:
        if rep.descriptor.get("direct"):
            direct[rep.dims] = rep.per_point_l1_mean
        else:
            by_dims[rep.dims][rep.descriptor["n"]] = rep.per_point_l1_mean
    deltas: dict[int, dict[int, float]] = {}
    for dims, errs in by_dims.items():
        ns = sorted(errs)
        runs = [n for n in ns if n - 1 in errs]
        if errs and len(ns) < 3:
            raise ValueError("growth analysis needs at least 3 sizes")
        deltas[dims] = {n: math.log(errs[n]) - math.log(errs[n - 1])
                        for n in runs}
    fit_c = None
    pairs = []
    common = sorted(set(by_dims[1]) & set(by_dims[2]))
    if common and 1 in direct and 2 in direct:
        logs = []
        for n in common:
            x = by_dims[1][n] / direct[1]
            y = by_dims[2][n] / direct[2]
            pairs.append((n, x, y))
            logs.append(2.0 * math.log(x) - math.log(y))
        fit_c = math.exp(sum(logs) / len(logs))
    return GrowthStats(deltas, fit_c, pairs)


# -- table reproduction ---------------------------------------------------------------


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[dict]

    def to_csv(self) -> str:
        def cell(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(cell(row.get(c)) for c in self.columns))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())


def _cfg_for(family: str, channel_sum: str = "linear") -> ConvConfig:
    precision = "fp32" if family == "fp32" else "mixed"
    return ConvConfig(precision=precision, dot_order="huffman",
                      channel_sum=channel_sum)


def _cached_report(cache: dict | None, family: str, dims: int, n: int,
                   cfg: ConvConfig, channels: int, trials: int,
                   seed: int) -> ErrorReport:
    """Measurement memo shared across table reproductions (pure cache)."""
    key = ("direct" if n == 0 else n, family, dims, cfg.precision,
           cfg.dot_order, cfg.channel_sum, channels, trials, seed)
    if cache is not None and key in cache:
        return cache[key]
    if n == 0:
        spec = DirectSpec(KERNEL_SIZE, 1)
        rep = measure_error(spec, dims, cfg, trials, seed, channels)
    else:
        ts = curated_transform(n, dims, family)
        rep = measure_error(ts, dims, cfg, trials, seed, channels)
    if cache is not None:
        cache[key] = rep
    return rep


def _cached_pair(cache: dict | None, family: str, dims: int, n: int,
                 channels: int, trials: int, seed: int) -> dict[str, ErrorReport]:
    """Linear and pairwise channel-sum reports sharing one transform pass."""
    cfg = _cfg_for(family)
    reps = {}
    missing = []
    for v in ("linear", "pairwise"):
        key = ("direct" if n == 0 else n, family, dims, cfg.precision,
               cfg.dot_order, v, channels, trials, seed)
        if cache is not None and key in cache:
            reps[v] = cache[key]
        else:
            missing.append((v, key))
    if missing:
        spec = (DirectSpec(KERNEL_SIZE, 1) if n == 0
                else curated_transform(n, dims, family))
        fresh = _measure_variants(spec, dims, cfg, trials, seed, channels,
                                  [v for v, _ in missing])
        for v, key in missing:
            reps[v] = fresh[v]
            if cache is not None:
                cache[key] = fresh[v]
    return reps


def _table_mults() -> Table:
    counts = {3: range(4, 17), 5: range(6, 17)}
    columns = ["points", "out_k3", "mult_k3", "out_k3_2d", "mult_k3_2d",
               "out_k5", "mult_k5", "out_k5_2d", "mult_k5_2d"]
    rows = [{
        "points": 0,
        "out_k3": 1, "mult_k3": 3.0, "out_k3_2d": "1x1", "mult_k3_2d": 9.0,
        "out_k5": 1, "mult_k5": 5.0, "out_k5_2d": "1x1", "mult_k5_2d": 25.0,
    }]
    for m in range(4, 17):
        row: dict = {"points": m}
        for k in (3, 5):
            if m in counts[k]:
                n_o = m - k + 1
                mc1 = mult_count(k, n_o, 1)
                mc2 = mult_count(k, n_o, 2)
                row[f"out_k{k}"] = n_o
                row[f"mult_k{k}"] = round(float(mc1.mults_per_output), 2)
                row[f"out_k{k}_2d"] = f"{n_o}x{n_o}"
                row[f"mult_k{k}_2d"] = round(float(mc2.mults_per_output), 2)
            else:
                for c in (f"out_k{k}", f"mult_k{k}", f"out_k{k}_2d",
                          f"mult_k{k}_2d"):
                    row[c] = None
        rows.append(row)
    return Table("1", columns, rows)


def _table_errors(family: str, trials: int, seed: int,
                  sizes: Sequence[int], cache: dict | None) -> Table:
    with_ratio = family == "mixed"
    columns = ["n", "points_1d", "error_1d", "n_o_1d", "reference_1d",
               "points_2d", "error_2d", "n_o_2d", "reference_2d"]
    if with_ratio:
        columns += ["ratio_1d", "reference_ratio_1d",
                    "ratio_2d", "reference_ratio_2d"]
    cfg = _cfg_for(family)
    rows = []
    drow: dict = {"n": 0, "points_1d": "direct", "points_2d": "direct",
                  "n_o_1d": 1, "n_o_2d": "1x1"}
    for dims in (1, 2):
        rep = _cached_report(cache, family, dims, 0, cfg, 1, trials, seed)
        drow[f"error_{dims}d"] = rep.per_point_l1_mean
        drow[f"reference_{dims}d"] = DIRECT_ERROR[dims]
        if with_ratio:
            drow[f"ratio_{dims}d"] = 1.0
            drow[f"reference_ratio_{dims}d"] = 1.0
    rows.append(drow)
    for n in sizes:
        row = {"n": n, "n_o_1d": n - 2, "n_o_2d": f"{n - 2}x{n - 2}"}
        for dims in (1, 2):
            pts = pointsets.curated_points(n, dims, family)
            row[f"points_{dims}d"] = format_points(pts).replace(",", " ")
            rep = _cached_report(cache, family, dims, n, cfg, 1, trials, seed)
            row[f"error_{dims}d"] = rep.per_point_l1_mean
            row[f"reference_{dims}d"] = REFERENCE_ERROR[(family, dims)].get(n)
            if with_ratio:
                base = _cached_report(cache, "fp32", dims, n,
                                      _cfg_for("fp32"), 1, trials, seed)
                row[f"ratio_{dims}d"] = (rep.per_point_l1_mean
                                         / base.per_point_l1_mean)
                row[f"reference_ratio_{dims}d"] = (
                    REFERENCE_MIXED_RATIO[dims].get(n))
        rows.append(row)
    return Table("2" if family == "fp32" else "3", columns, rows)


def _table_channels(family: str, dims: int, trials: int, seed: int,
                    cache: dict | None) -> Table:
    columns = ["out_size", "error_1ch",
               "error_32ch", "error_32ch_pairwise", "ratio_32", "reference_32",
               "error_64ch", "error_64ch_pairwise", "ratio_64", "reference_64"]
    rows = []
    for out in range(1, 8):
        n = 0 if out == 1 else out + 2
        row: dict = {"out_size": out if dims == 1 else f"{out}x{out}"}
        one = _cached_report(cache, family, dims, n, _cfg_for(family), 1,
                             trials, seed)
        row["error_1ch"] = one.per_point_l1_mean
        refs = REFERENCE_CHANNEL_RATIO[(family, dims)][out]
        for c_i, channels in enumerate((32, 64)):
            pair = _cached_pair(cache, family, dims, n, channels, trials, seed)
            lin = pair["linear"].per_point_l1_mean
            pw = pair["pairwise"].per_point_l1_mean
            row[f"error_{channels}ch"] = lin
            row[f"error_{channels}ch_pairwise"] = pw
            row[f"ratio_{channels}"] = 100.0 * pw / lin
            row[f"reference_{channels}"] = float(refs[c_i])
        rows.append(row)
    name = {("fp32", 1): "4", ("fp32", 2): "5",
            ("mixed", 1): "6", ("mixed", 2): "7"}[(family, dims)]
    return Table(name, columns, rows)


def _table_combined(trials: int, seed: int, cache: dict | None) -> Table:
    columns = ["out_size", "dims", "ratio_32", "reference_32",
               "ratio_64", "reference_64"]
    rows = []
    for dims in (1, 2):
        for out in range(1, 8):
            n = 0 if out == 1 else out + 2
            row: dict = {"out_size": out if dims == 1 else f"{out}x{out}",
                         "dims": dims}
            refs = REFERENCE_COMBINED_RATIO[dims][out]
            for c_i, channels in enumerate((32, 64)):
                best = _cached_pair(cache, "mixed", dims, n, channels,
                                    trials, seed)["pairwise"]
                base = _cached_pair(cache, "fp32", dims, n, channels,
                                    trials, seed)["linear"]
                row[f"ratio_{channels}"] = (100.0 * best.per_point_l1_mean
                                            / base.per_point_l1_mean)
                row[f"reference_{channels}"] = float(refs[c_i])
            rows.append(row)
    return Table("8", columns, rows)


def _table_chebyshev(trials: int, seed: int, sizes: Sequence[int],
                     cache: dict | None) -> Table:
    columns = ["n", "error_1d", "chebyshev_1d", "ratio_1d", "reference_1d",
               "error_2d", "chebyshev_2d", "ratio_2d", "reference_2d"]
    rows = []
    per_dim = {dims: {r["n"]: r for r in compare_chebyshev(
        sizes, dims, _cfg_for("fp32"), trials, seed, cache)} for dims in (1, 2)}
    for n in sizes:
        r1, r2 = per_dim[1][n], per_dim[2][n]
        rows.append({
            "n": n,
            "error_1d": r1["curated_error"],
            "chebyshev_1d": r1["chebyshev_error"],
            "ratio_1d": r1["ratio"],
            "reference_1d": r1["reference_ratio"],
            "error_2d": r2["curated_error"],
            "chebyshev_2d": r2["chebyshev_error"],
            "ratio_2d": r2["ratio"],
            "reference_2d": r2["reference_ratio"],
        })
    return Table("D", columns, rows)


def reproduce_table(which: str, trials: int = 5000, seed: int = 0,
                    sizes: Sequence[int] | None = None,
                    cache: dict | None = None) -> Table:
    """Regenerate one reference table's measured columns.

    ``which`` is one of 1..8 or D.  Deterministic given (seed, trials); an
    optional cache dict shares measurements across table reproductions.
    """
    which = str(which)
    sizes = tuple(sizes) if sizes is not None else tuple(pointsets.SIZES)
    if which == "1":
        return _table_mults()
    if which == "2":
        return _table_errors("fp32", trials, seed, sizes, cache)
    if which == "3":
        return _table_errors("mixed", trials, seed, sizes, cache)
    if which in ("4", "5", "6", "7"):
        family = "fp32" if which in ("4", "5") else "mixed"
        dims = 1 if which in ("4", "6") else 2
        return _table_channels(family, dims, trials, seed, cache)
    if which == "8":
        return _table_combined(trials, seed, cache)
    if which == "D":
        return _table_chebyshev(trials, seed, sizes, cache)
    raise ValueError(f"unknown table id {which!r}")
