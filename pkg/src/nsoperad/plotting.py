"""Matplotlib figures for the report commands (headless backend)."""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

UNCERTIFIED_HATCH = "//"


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_hh(rows: Sequence[tuple[int, int, bool]], path, title: str = "") -> Path:
    """Bars of dim HH^t; uncertified degrees are hatched and pale."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ts = [t for t, _, _ in rows]
    for t, dim, cert in rows:
        ax.bar(t, dim, color="tab:blue" if cert else "lightgray",
               hatch=None if cert else UNCERTIFIED_HATCH, edgecolor="black", linewidth=0.6)
    ax.set_xticks(ts)
    ax.set_xlabel("total degree t = q - p")
    ax.set_ylabel("dim HH")
    ax.set_title(title or "Hochschild cohomology")
    return _finish(fig, path)


def plot_pages(pages, path, title: str = "") -> Path:
    """One panel per page: cell grid with p across and q down, dims annotated."""
    n = len(pages)
    cols = min(n, 3)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.6 * cols, 3.2 * rows), squeeze=False)
    cells = sorted({c for pt in pages for c in pt.dims})
    pmax = max((p for p, _ in cells), default=0)
    qmax = max((q for _, q in cells), default=0)
    for k, pt in enumerate(pages):
        ax = axes[k // cols][k % cols]
        grid = [[0] * (pmax + 1) for _ in range(qmax + 1)]
        for (p, q), d in pt.dims.items():
            grid[q][p] = d
        ax.imshow(grid, cmap="Blues", origin="upper", aspect="auto")
        for (p, q), d in pt.dims.items():
            if d:
                ax.text(p, q, str(d) + ("" if pt.certified[(p, q)] else "?"), ha="center", va="center", fontsize=8)
        ax.set_title(f"E_{pt.r}")
        ax.set_xlabel("p")
        ax.set_ylabel("q")
    for k in range(n, rows * cols):
        axes[k // cols][k % cols].axis("off")
    if title:
        fig.suptitle(title)
    return _finish(fig, path)


def plot_dims_table(table: Mapping[tuple[int, int], int], path, title: str = "",
                    certified: Mapping[tuple[int, int], bool] | None = None) -> Path:
    """Heat map of dimensions indexed by (arity, degree)."""
    arities = sorted({n for n, _ in table})
    degrees = sorted({k for _, k in table})
    grid = [[table.get((n, k), 0) for n in arities] for k in degrees]
    fig, ax = plt.subplots(figsize=(1 + 0.8 * len(arities), 1 + 0.5 * len(degrees)))
    ax.imshow(grid, cmap="Greens", origin="lower", aspect="auto")
    for i, k in enumerate(degrees):
        for j, n in enumerate(arities):
            v = table.get((n, k), 0)
            mark = "" if certified is None or certified.get((n, k), True) else "?"
            ax.text(j, i, f"{v}{mark}", ha="center", va="center", fontsize=8)
    ax.set_xticks(range(len(arities)), [str(n) for n in arities])
    ax.set_yticks(range(len(degrees)), [str(k) for k in degrees])
    ax.set_xlabel("arity")
    ax.set_ylabel("degree")
    ax.set_title(title or "dimensions")
    return _finish(fig, path)
