"""Comparison plots over run_experiment results."""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

log = logging.getLogger(__name__)


def plot_results(results: pd.DataFrame, outdir: str | Path) -> list[Path]:
    """Write AUC box plots, discrimination bars, and (when alpha-sweep rows
    exist) the utility/ROD trade-off panel. Returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    classifiers = sorted(results["classifier"].unique())
    runs = list(dict.fromkeys(results["run"]))

    fig, axes = plt.subplots(1, len(classifiers), figsize=(4 * len(classifiers), 3.5), squeeze=False)
    for ax, name in zip(axes[0], classifiers):
        block = results[results["classifier"] == name]
        data = [block[block["run"] == run]["auc"].to_numpy() for run in runs]
        ax.boxplot(data, tick_labels=runs)
        ax.set_title(name)
        ax.set_ylabel("AUC")
        ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    path = outdir / "auc_box.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(1.5 * len(runs) * max(1, len(classifiers) / 2) + 2, 3.5))
    width = 0.8 / len(classifiers)
    xs = np.arange(len(runs))
    for i, name in enumerate(classifiers):
        block = results[results["classifier"] == name]
        means = [block[block["run"] == run]["rod_normalized"].mean() for run in runs]
        ax.bar(xs + i * width, means, width=width, label=name)
    ax.set_xticks(xs + 0.4 - width / 2)
    ax.set_xticklabels(runs, rotation=30)
    ax.set_ylabel("mean normalized discrimination")
    ax.legend()
    fig.tight_layout()
    path = outdir / "rod_bars.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    sweep = results[results["run"].str.startswith("alpha=")].copy()
    if sweep.empty or sweep["run"].nunique() < 2:
        log.info("no alpha sweep in results; skipping the trade-off panel")
        return written

    sweep["alpha"] = sweep["run"].str.removeprefix("alpha=").astype(float)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, metric, label in ((axes[0], "auc", "AUC"), (axes[1], "rod_normalized", "normalized discrimination")):
        for name in classifiers:
            block = sweep[sweep["classifier"] == name]
            ax.scatter(block["alpha"], block[metric], s=12, label=name)
            slope, intercept = np.polyfit(block["alpha"], block[metric], 1)
            grid = np.linspace(block["alpha"].min(), block["alpha"].max(), 50)
            ax.plot(grid, slope * grid + intercept)
        ax.set_xlabel("alpha")
        ax.set_ylabel(label)
    axes[0].legend()
    fig.tight_layout()
    path = outdir / "alpha_tradeoff.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)
    return written
