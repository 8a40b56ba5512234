"""Figure builders for run and suite artifacts.

Styling is fixed (no timestamps, fixed hash salt, fixed figure geometry) so
that rendering the same inputs twice produces byte-identical images.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import ColumnError, load_records_jsonl, load_table_csv

plt.rcParams["svg.hashsalt"] = "nspr-viz"
plt.rcParams["figure.dpi"] = 110

_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b",
                  "#e377c2", "#7f7f7f")


def freedman_diaconis_bins(values, floor=10):
    """Freedman-Diaconis bin count with a floor for small samples."""
    values = np.asarray(values, float)
    n = values.size
    if n < 2:
        return floor
    q25, q75 = np.percentile(values, [25.0, 75.0])
    spread = values.max() - values.min()
    width = 2.0 * (q75 - q25) / n ** (1.0 / 3.0)
    if width <= 0.0 or spread <= 0.0:
        return floor
    return max(int(np.ceil(spread / width)), floor)


def _sample_matrix(path):
    table = load_table_csv(path)
    names = list(table)
    if not names:
        raise ColumnError(path, "?")
    data = np.array([table[name] for name in names], float).T
    if data.size == 0:
        raise ColumnError(path, names[0], "file holds no rows")
    return names, data


def corner(paths):
    """Histogram diagonal plus pairwise 2D density panels."""
    names, data = _sample_matrix(paths[0])
    k = len(names)
    fig, axes = plt.subplots(k, k, figsize=(2.2 * k, 2.2 * k),
                             squeeze=False)
    for i in range(k):
        for j in range(k):
            ax = axes[i][j]
            if j > i:
                ax.set_visible(False)
                continue
            if i == j:
                ax.hist(data[:, i], bins=freedman_diaconis_bins(data[:, i]),
                        color=_SERIES_COLORS[0], histtype="stepfilled",
                        alpha=0.8)
                ax.set_yticks([])
            else:
                ax.hist2d(data[:, j], data[:, i],
                          bins=max(freedman_diaconis_bins(data[:, j]) // 2,
                                   10),
                          cmap="Blues")
            if i == k - 1:
                ax.set_xlabel(names[j])
            else:
                ax.set_xticklabels([])
            if j == 0 and i > 0:
                ax.set_ylabel(names[i])
    fig.align_labels()
    fig.tight_layout()
    return fig


def beta_marginal(paths):
    """Overlayed repartition-exponent marginals, one per input run."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for idx, path in enumerate(paths):
        table = load_table_csv(path, required=("beta",))
        betas = np.asarray(table["beta"], float)
        ax.hist(betas, bins=freedman_diaconis_bins(betas), density=True,
                histtype="step", linewidth=1.6,
                color=_SERIES_COLORS[idx % len(_SERIES_COLORS)],
                label=f"run {idx + 1} (max {betas.max():.3f})")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel("posterior density")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def prior_evolution(paths):
    """Tempered prior density curves, one per exponent, steepest first."""
    table = load_table_csv(paths[0], required=("beta", "theta", "density"))
    beta = np.asarray(table["beta"], float)
    theta = np.asarray(table["theta"], float)
    dens = np.asarray(table["density"], float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    levels = sorted(set(beta), reverse=True)
    for idx, level in enumerate(levels):
        mask = beta == level
        order = np.argsort(theta[mask])
        ax.plot(theta[mask][order], dens[mask][order],
                color=_SERIES_COLORS[idx % len(_SERIES_COLORS)],
                label=rf"$\beta = {level:g}$")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel("prior density")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def _two_series_vs_theta(path, value_label):
    table = load_table_csv(path, required=("theta_star",))
    series = [name for name in table if name != "theta_star"]
    if len(series) < 2:
        raise ColumnError(path, "second series", "missing")
    theta = np.asarray(table["theta_star"], float)
    order = np.argsort(theta)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for idx, name in enumerate(series):
        ax.plot(theta[order], np.asarray(table[name], float)[order],
                marker="o", color=_SERIES_COLORS[idx % len(_SERIES_COLORS)],
                label=name.replace("_", " "))
    ax.set_xlabel(r"$\theta^*$")
    ax.set_ylabel(value_label)
    ax.set_yscale("log")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def rmse_vs_theta(paths):
    return _two_series_vs_theta(paths[0], "RMSE of posterior mean")


def nlike_vs_theta(paths):
    return _two_series_vs_theta(paths[0], "likelihood evaluations")


def boxplots(paths):
    """Per-case evidence-error boxes from a suite record journal.

    Whiskers span min to max, boxes the quartiles, the line the median.
    """
    records = load_records_jsonl(
        paths[0], required=("case", "mode", "log_z", "oracle_log_z"))
    groups = {}
    for rec in records:
        if rec["mode"] != "auto" or rec.get("failed"):
            continue
        err = float(rec["log_z"]) - float(rec["oracle_log_z"])
        groups.setdefault(rec["case"], []).append(err)
    if not groups:
        raise ColumnError(paths[0], "mode", "holds no converged auto records")
    labels = list(groups)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.8 * len(labels)), 4.0))
    ax.boxplot([groups[name] for name in labels], tick_labels=labels,
               whis=(0.0, 100.0), showfliers=False,
               medianprops={"color": _SERIES_COLORS[1]})
    ax.axhline(0.0, color="0.6", linewidth=0.8, linestyle="--")
    ax.set_ylabel(r"$\log Z$ error")
    ax.tick_params(axis="x", rotation=45)
    fig.tight_layout()
    return fig


PLOT_KINDS = {
    "corner": corner,
    "beta-marginal": beta_marginal,
    "prior-evolution": prior_evolution,
    "rmse-vs-theta": rmse_vs_theta,
    "nlike-vs-theta": nlike_vs_theta,
    "boxplots": boxplots,
}


def render(kind, paths, out):
    """Build the requested figure and save it with deterministic bytes."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind: {kind!r}")
    if not paths:
        raise ValueError("at least one input path is required")
    fig = PLOT_KINDS[kind](list(paths))
    try:
        metadata = {"Date": None} if str(out).endswith(".svg") else {}
        fig.savefig(out, metadata=metadata)
    finally:
        plt.close(fig)
