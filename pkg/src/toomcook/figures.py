"""Matplotlib rendering for harness reports.

Each CLI report path can render a figure file next to its delimited output;
everything here draws onto the Agg backend and writes straight to disk.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_table_figure(table, path) -> None:
    """Dispatch on table id: error curves for 2/3/D, ratio bars for 4..8."""
    if table.name in ("2", "3"):
        _error_curves(table, path)
    elif table.name == "D":
        _chebyshev_curves(table, path)
    elif table.name in ("4", "5", "6", "7", "8"):
        _ratio_bars(table, path)
    else:
        _mult_curves(table, path)


def _error_curves(table, path) -> None:
    rows = [r for r in table.rows if r["n"] != 0]
    ns = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for dims, marker in ((1, "o"), (2, "s")):
        ax.semilogy(ns, [r[f"error_{dims}d"] for r in rows], marker=marker,
                    label=f"{dims}D measured")
        ref = [r[f"reference_{dims}d"] for r in rows]
        if all(v is not None for v in ref):
            ax.semilogy(ns, ref, linestyle="--", alpha=0.6,
                        label=f"{dims}D reference")
    ax.set_xlabel("number of points n")
    ax.set_ylabel("mean L1 error per output point")
    ax.set_title(f"Table {table.name}: error vs n")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _chebyshev_curves(table, path) -> None:
    ns = [r["n"] for r in table.rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for dims in (1, 2):
        ax.semilogy(ns, [r[f"ratio_{dims}d"] for r in table.rows], marker="o",
                    label=f"{dims}D chebyshev/curated")
    ax.axhline(1.0, color="k", linewidth=0.8)
    ax.set_xlabel("number of points n")
    ax.set_ylabel("error ratio")
    ax.set_title("Chebyshev nodes vs curated points")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _ratio_bars(table, path) -> None:
    labels = [str(r["out_size"]) + (f" ({r['dims']}D)" if "dims" in r else "")
              for r in table.rows]
    idx = np.arange(len(labels))
    width = 0.35
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(idx - width / 2, [r["ratio_32"] for r in table.rows], width,
           label="32 channels")
    ax.bar(idx + width / 2, [r["ratio_64"] for r in table.rows], width,
           label="64 channels")
    ax.axhline(100.0, color="k", linewidth=0.8)
    ax.set_xticks(idx, labels, rotation=45, fontsize=8)
    ax.set_ylabel("ratio (%)")
    ax.set_title(f"Table {table.name}: summation-strategy error ratio")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _mult_curves(table, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, label in (("mult_k3", "1D, kernel 3"), ("mult_k3_2d", "2D, kernel 3x3"),
                       ("mult_k5", "1D, kernel 5"), ("mult_k5_2d", "2D, kernel 5x5")):
        pts = [(r["points"], r[key]) for r in table.rows if r.get(key) is not None]
        ax.plot([p for p, _ in pts], [v for _, v in pts], marker=".", label=label)
    ax.set_xlabel("number of points")
    ax.set_ylabel("multiplications per output")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trial_histogram(report, path) -> None:
    if report.per_trial is None:
        raise ValueError("report carries no per-trial errors")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(report.per_trial, bins=60, color="tab:blue", alpha=0.8)
    ax.set_xlabel("per-trial total L1 error")
    ax.set_ylabel("trials")
    ax.set_title(f"n={report.descriptor.get('n')} dims={report.dims} "
                 f"{report.config['precision']}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_growth_figure(stats, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for dims, color in ((1, "tab:blue"), (2, "tab:orange")):
        d = stats.deltas.get(dims, {})
        if d:
            ns = sorted(d)
            axes[0].plot(ns, [d[n] for n in ns], marker="o", color=color,
                         label=f"{dims}D")
    axes[0].axhline(0.0, color="k", linewidth=0.8)
    axes[0].set_xlabel("number of points n")
    axes[0].set_ylabel("log(err_n) - log(err_{n-1})")
    axes[0].set_title("error growth per added point")
    axes[0].legend(fontsize=8)
    if stats.pairs:
        xs = np.array([p[1] for p in stats.pairs])
        ys = np.array([p[2] for p in stats.pairs])
        axes[1].loglog(xs, ys, "o", label="measured")
        if stats.fit_c:
            grid = np.geomspace(xs.min(), xs.max(), 50)
            axes[1].loglog(grid, grid ** 2 / stats.fit_c, "--",
                           label=f"x^2 / {stats.fit_c:.2f}")
        axes[1].set_xlabel("1D error / direct")
        axes[1].set_ylabel("2D error / direct")
        axes[1].set_title("2D error vs 1D error")
        axes[1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
