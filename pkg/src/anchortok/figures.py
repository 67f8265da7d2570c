"""Figure rendering for eval and sweep reports.

Everything draws through the Agg backend straight to files; CSV and
JSON stay the canonical outputs, these are the human-facing views.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .harness import pca_project


def _scatter_panel(ax, proj: np.ndarray, anchor_ids, title: str) -> None:
    mask = np.zeros(proj.shape[0], dtype=bool)
    mask[list(anchor_ids)] = True
    ax.scatter(proj[~mask, 0], proj[~mask, 1], s=12, c="#7f7f7f", alpha=0.7,
               label="node")
    ax.scatter(proj[mask, 0], proj[mask, 1], s=36, c="red", marker="^",
               label="anchor")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)


def embedding_scatter(features: np.ndarray, embedding: np.ndarray,
                      anchor_ids, out_path) -> Path:
    """Side-by-side 2-D projections of raw features and embeddings."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    _scatter_panel(axes[0], pca_project(features, 2), anchor_ids,
                   "encoding (projected)")
    _scatter_panel(axes[1], pca_project(embedding, 2), anchor_ids,
                   "embedding (projected)")
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def error_histogram(hist: dict, out_path) -> Path:
    """Bar chart of the integer estimate-error histogram."""
    keys = sorted(int(k) for k in hist)
    counts = [hist[str(k)] for k in keys]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(keys, counts, width=0.8, color="#4878d0")
    ax.set_xlabel("estimate - true distance (hops)")
    ax.set_ylabel("pairs")
    ax.set_title("distance estimate error")
    if keys:
        ax.set_xticks(keys)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def sweep_curves(rows: list, out_path) -> Path:
    """Anchor count and order agreement against CR, one line per c."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for c in sorted({r["c"] for r in rows}):
        line = sorted((r for r in rows if r["c"] == c), key=lambda r: r["cr"])
        crs = [r["cr"] for r in line]
        axes[0].plot(crs, [r["anchors"] for r in line], marker="o",
                     label=f"c={c}")
        axes[1].plot(crs, [r["agreement"] for r in line], marker="o",
                     label=f"c={c}")
    axes[0].set_xlabel("coverage ratio")
    axes[0].set_ylabel("anchors")
    axes[1].set_xlabel("coverage ratio")
    axes[1].set_ylabel("order agreement")
    for ax in axes:
        ax.legend(fontsize=8)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
