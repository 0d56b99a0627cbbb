"""Matplotlib renderings of the CSV outputs (PNG next to each CSV)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "lines.linewidth": 1.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

# points drawn per rank curve; 475k markers make large, slow PNGs
MAX_POINTS = 4000


def _thin(log10_values: np.ndarray):
    n = len(log10_values)
    if n <= MAX_POINTS:
        r = np.arange(1, n + 1)
    else:
        r = np.unique(np.round(np.logspace(0, math.log10(n), MAX_POINTS)).astype(int))
    return np.log10(r), np.asarray(log10_values)[r - 1]


def rank_panels(tables: dict, path, slopes: dict | None = None, title: str = "") -> None:
    """One log-log panel per table; ``tables`` maps label -> RankFrequencyTable."""
    with plt.rc_context(STYLE):
        n = len(tables)
        cols = 2 if n > 1 else 1
        rows = math.ceil(n / cols)
        fig, axes = plt.subplots(rows, cols, figsize=(4.0 * cols, 3.2 * rows), squeeze=False)
        for ax, (label, t) in zip(axes.flat, tables.items()):
            x, y = _thin(t.log10_values)
            ax.plot(x, y, ".", ms=1.5)
            head = label
            if slopes and label in slopes:
                head += f"  (slope {slopes[label]:.3f})"
            ax.set_title(head)
            ax.set_xlabel("log10 rank")
            ax.set_ylabel("log10 value")
        for ax in list(axes.flat)[n:]:
            ax.set_visible(False)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def quantile_plot(report, path, title: str = "") -> None:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 4.0))
        ax.plot(report.theoretical_z, report.observed_z, ".", ms=2)
        lim = [float(np.min(report.theoretical_z)), float(np.max(report.theoretical_z))]
        ax.plot(lim, lim, "k-", lw=0.6)
        lo, hi = report.band
        ax.set_title(title or f"normal quantiles; band {lo:g}-{hi:g} dev {report.deviation:.3f}")
        ax.set_xlabel("standard normal quantile")
        ax.set_ylabel("standardized ln P")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def convergence_plot(rows: list[dict], path) -> None:
    """``rows`` carry ``K``, ``neg_beta`` and ``mean_log_letter``."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        by_dist: dict = {}
        for row in rows:
            by_dist.setdefault(row["dist"], []).append(row)
        for dist, rs in by_dist.items():
            K = [r["K"] for r in rs]
            ax.plot(K, [r["neg_beta"] for r in rs], "o-", ms=3, label=f"{dist}: -beta")
            ax.plot(K, [r["mean_log_letter"] for r in rs], "x--", ms=3, label=f"{dist}: mean log_K q")
        ax.axhline(-1.0, color="k", lw=0.6)
        ax.set_xscale("log", base=2)
        ax.set_xlabel("K")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
