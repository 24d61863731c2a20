"""Command-line surface: generation, convolution, measurement, search,
bounds, and table reproduction.

Exit codes: 0 success, 1 unexpected failure, 2 validation error, 3 I/O
error, 4 numerical failure.  Output files are only written after the
computation has fully succeeded.  When TOOMCOOK_OUT_DIR is set, relative
--out/--figure paths are resolved against it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import analysis, figures, harness, pointsets
from .engine import ConvConfig, conv_1d, conv_2d, conv_direct
from .exact import format_points, parse_points
from .harness import DirectSpec, ErrorReport, SearchState, measure_error
from .transforms import (
    TransformSet,
    build_transforms,
    chebyshev_points,
    read_transform_json,
)

EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

OUT_DIR_ENV = "TOOMCOOK_OUT_DIR"


def _resolve(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# -- tensor files -------------------------------------------------------------


def load_tensor(path: str) -> tuple[np.ndarray, int]:
    """Tensor file -> (channel-major array, dims).

    JSON: {"dims": d, "shape": [C, ...], "data": nested}.  CSV: header line
    "shape,C,n[,n]" then one line of flattened values per channel.
    """
    if path.endswith(".json"):
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
        arr = np.array(d["data"], dtype=np.float64)
        dims = int(d["dims"])
        if list(arr.shape) != list(d["shape"]):
            raise ValueError(f"{path}: data does not match declared shape")
        return arr, dims
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head = lines[0].split(",")
    if head[0] != "shape":
        raise ValueError(f"{path}: missing 'shape' header")
    shape = tuple(int(v) for v in head[1:])
    dims = len(shape) - 1
    data = [np.array([float(v) for v in ln.split(",")]) for ln in lines[1:]]
    if len(data) != shape[0]:
        raise ValueError(f"{path}: expected {shape[0]} channel rows")
    arr = np.stack(data).reshape(shape)
    return arr, dims


def save_tensor(path: str | None, arr: np.ndarray, dims: int,
                fmt: str) -> None:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == dims:
        arr = arr[np.newaxis]
    if fmt == "json":
        text = json.dumps({"dims": dims, "shape": list(arr.shape),
                           "data": arr.tolist()}, indent=1) + "\n"
    else:
        lines = ["shape," + ",".join(str(s) for s in arr.shape)]
        for c in range(arr.shape[0]):
            lines.append(",".join(repr(float(v)) for v in arr[c].ravel()))
        text = "\n".join(lines) + "\n"
    _write_text(path, text)


# -- shared flags --------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--precision", choices=("fp32", "fp64", "mixed"),
                   default="fp32")
    p.add_argument("--dot-order", choices=("linear", "huffman"),
                   default="huffman")
    p.add_argument("--channel-sum", choices=("linear", "pairwise"),
                   default="linear")
    p.add_argument("--channels", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--figure", default=None,
                   help="also render a figure to this path")


def _cfg(args) -> ConvConfig:
    return ConvConfig(precision=args.precision, dot_order=args.dot_order,
                      channel_sum=args.channel_sum)


def _load_matrix(args) -> TransformSet:
    return read_transform_json(args.matrix)


# -- subcommands ----------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.chebyshev is not None:
        pts = chebyshev_points(args.chebyshev)
    elif args.points is not None:
        pts = parse_points(args.points)
    else:
        raise ValueError("gen requires --points or --chebyshev")
    n_h = args.nh
    n_o = args.no if args.no is not None else len(pts) - n_h + 1
    ts = build_transforms(n_h, n_o, pts)
    out = _resolve(args.out)
    if args.format == "text":
        lines = [f"n_h={ts.n_h} n_o={ts.n_o} n={ts.n} "
                 f"modified={str(ts.modified).lower()}",
                 f"points: {format_points(ts.points)}"]
        from .exact import format_rational
        for name in ("A_T", "G", "B_T"):
            lines.append(f"{name}:")
            for row in ts.matrix(name):
                lines.append("  " + "  ".join(f"{format_rational(v):>8}"
                                              for v in row))
        _write_text(out, "\n".join(lines) + "\n")
    else:
        if out is None:
            sys.stdout.write(json.dumps(ts.to_json_dict(), indent=1) + "\n")
        else:
            ts.write_json(out)
    return 0


def cmd_convolve(args) -> int:
    h, hdims = load_tensor(args.kernel)
    x, xdims = load_tensor(args.input)
    if hdims != xdims:
        raise ValueError("kernel and input dims disagree")
    cfg = _cfg(args)
    if args.direct:
        out = conv_direct(h, x, hdims, precision=cfg.precision,
                          channel_sum=cfg.channel_sum)
    else:
        ts = _load_matrix(args)
        out = (conv_1d if hdims == 1 else conv_2d)(ts, h, x, cfg)
    save_tensor(_resolve(args.out), out, hdims,
                "json" if args.format == "json" else "csv")
    return 0


def _report_text(rep: ErrorReport) -> str:
    d = rep.descriptor
    what = "direct" if d.get("direct") else f"n={d['n']} {d['points']}"
    return (f"{what} dims={rep.dims} channels={rep.channels} "
            f"cfg={rep.config} trials={rep.trials} seed={rep.seed}\n"
            f"total L1 mean:     {rep.total_l1_mean:.6e}\n"
            f"per-point L1 mean: {rep.per_point_l1_mean:.6e}\n")


def cmd_measure(args) -> int:
    cfg = _cfg(args)
    if args.direct:
        if args.no is None:
            raise ValueError("--direct needs --no (output size)")
        spec = DirectSpec(args.nh, args.no)
    else:
        spec = _load_matrix(args)
    rep = measure_error(spec, args.dims, cfg, trials=args.trials,
                        seed=args.seed, channels=args.channels)
    out = _resolve(args.out)
    if args.format == "json":
        text = json.dumps(rep.to_json_dict(include_trials=args.keep_trials),
                          indent=1) + "\n"
    elif args.format == "csv":
        text = ("dims,channels,precision,dot_order,channel_sum,trials,seed,"
                "total_l1_mean,per_point_l1_mean\n"
                f"{rep.dims},{rep.channels},{cfg.precision},{cfg.dot_order},"
                f"{cfg.channel_sum},{rep.trials},{rep.seed},"
                f"{rep.total_l1_mean!r},{rep.per_point_l1_mean!r}\n")
    else:
        text = _report_text(rep)
    _write_text(out, text)
    if args.figure:
        figures.save_trial_histogram(rep, _resolve(args.figure))
    return 0


def cmd_search(args) -> int:
    state = SearchState.seeded_with_curated()
    results = harness.search_points(args.n, args.dims, state, _cfg(args),
                                    trials=args.trials, seed=args.seed)
    rows = [{"rank": i + 1,
             "points": format_points(r.points).replace(",", " "),
             "per_point_error": r.report.per_point_l1_mean,
             "tie_with_first": r.tie_with_first}
            for i, r in enumerate(results)]
    out = _resolve(args.out)
    if args.format == "json":
        text = json.dumps(rows, indent=1, default=str) + "\n"
    else:
        lines = ["rank,points,per_point_error,tie_with_first"]
        lines += [f"{r['rank']},{r['points']},{r['per_point_error']!r},"
                  f"{str(r['tie_with_first']).lower()}" for r in rows]
        text = "\n".join(lines) + "\n"
    _write_text(out, text)
    return 0


def cmd_bounds(args) -> int:
    ts = _load_matrix(args)
    consts = analysis.constants_for(ts, method=args.dot_order,
                                    precision=args.precision)
    h = x = None
    if args.kernel and args.input:
        h, _ = load_tensor(args.kernel)
        x, _ = load_tensor(args.input)
    if args.channels > 1 or h is None:
        rep = analysis.bound_multichannel(ts, args.channels, args.dims,
                                          args.channel_sum, consts,
                                          h=h, x=x, precision=args.precision)
    elif args.dims == 1:
        rep = analysis.bound_1d(ts, h[0], x[0], consts,
                                precision=args.precision)
    else:
        rep = analysis.bound_2d(ts, h[0], x[0], consts,
                                precision=args.precision)
    if not np.all(np.isfinite(np.asarray(rep.normwise_bound))):
        raise FloatingPointError("bound is not finite")
    text = json.dumps(rep.to_json_dict(), indent=1) + "\n"
    _write_text(_resolve(args.out), text)
    return 0


def cmd_table(args) -> int:
    sizes = None
    if args.sizes:
        sizes = [int(s) for s in args.sizes.split(",")]
    table = harness.reproduce_table(args.which, trials=args.trials,
                                    seed=args.seed, sizes=sizes)
    out = _resolve(args.out)
    if args.format == "json":
        _write_text(out, json.dumps(
            {"table": table.name, "rows": table.rows}, indent=1,
            default=str) + "\n")
    else:
        _write_text(out, table.to_csv())
    if args.figure:
        figures.save_table_figure(table, _resolve(args.figure))
    return 0


def cmd_growth(args) -> int:
    cfg = _cfg(args)
    sizes = range(args.n_min, args.n_max + 1)
    reports = []
    for dims in (1, 2):
        reports.append(measure_error(DirectSpec(3, 1), dims, cfg,
                                     trials=args.trials, seed=args.seed,
                                     keep_trials=False))
        for n in sizes:
            ts = pointsets.curated_transform(n, dims)
            reports.append(measure_error(ts, dims, cfg, trials=args.trials,
                                         seed=args.seed, keep_trials=False))
    stats = harness.growth_analysis(reports)
    lines = ["dims,n,delta_log_error"]
    for dims in (1, 2):
        for n in sorted(stats.deltas.get(dims, {})):
            lines.append(f"{dims},{n},{stats.deltas[dims][n]!r}")
    lines.append(f"fit_c,,{stats.fit_c!r}")
    _write_text(_resolve(args.out), "\n".join(lines) + "\n")
    if args.figure:
        figures.save_growth_figure(stats, _resolve(args.figure))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toomcook",
        description="Toom-Cook convolution transforms, error measurement, "
                    "and analytic bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="construct a transform triple")
    _add_common(p)
    p.add_argument("--nh", type=int, default=3, help="kernel size")
    p.add_argument("--no", type=int, default=None, help="output size")
    p.add_argument("--points", default=None, help='e.g. "0,-1,1,inf"')
    p.add_argument("--chebyshev", type=int, default=None,
                   help="use n Chebyshev nodes instead of --points")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convolve", help="run one convolution")
    _add_common(p)
    p.add_argument("--matrix", help="transform JSON file")
    p.add_argument("--kernel", required=True, help="kernel tensor file")
    p.add_argument("--input", required=True, help="input tensor file")
    p.add_argument("--direct", action="store_true",
                   help="direct convolution instead of a transform")
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("measure", help="Monte-Carlo error measurement")
    _add_common(p)
    p.add_argument("--matrix", help="transform JSON file")
    p.add_argument("--dims", type=int, choices=(1, 2), default=1)
    p.add_argument("--direct", action="store_true")
    p.add_argument("--nh", type=int, default=3)
    p.add_argument("--no", type=int, default=None)
    p.add_argument("--keep-trials", action="store_true",
                   help="include per-trial errors in JSON output")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("search", help="rank candidate point sets")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dims", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bounds", help="analytic worst-case error bounds")
    _add_common(p)
    p.add_argument("--matrix", required=True)
    p.add_argument("--dims", type=int, choices=(1, 2), default=1)
    p.add_argument("--kernel", default=None)
    p.add_argument("--input", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table", help="reproduce a reference table")
    _add_common(p)
    p.add_argument("--which", required=True,
                   choices=("1", "2", "3", "4", "5", "6", "7", "8", "D"))
    p.add_argument("--sizes", default=None,
                   help="comma-separated n values (tables 2/3/D)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("growth", help="error growth analysis over n")
    _add_common(p)
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=12)
    p.set_defaults(func=cmd_growth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except (OverflowError, ZeroDivisionError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
