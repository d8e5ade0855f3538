"""Matplotlib figures written next to the CLI's reports."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .geometry import XY, Barrier, Line  # noqa: E402
from .svg import _line_in_box, _view  # noqa: E402


def _square(ax):
    ax.plot([0, 1, 1, 0, 0], [0, 0, 1, 1, 0], color="0.55", lw=1)


def barrier_figure(barrier: Barrier, path: str, witness: Optional[Line] = None,
                   cuts: Sequence[Tuple[XY, XY]] = (), title: Optional[str] = None,
                   sweep: Optional[Sequence[Tuple[XY, XY]]] = None) -> str:
    """Barrier, optional partition cuts, witness line and sweep positions."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    _square(ax)
    for p, q in cuts:
        ax.plot([p[0], q[0]], [p[1], q[1]], color="#4a7", lw=0.8)
    for s in barrier:
        (ax_, ay), (bx, by) = s.a.xy, s.b.xy
        ax.plot([ax_, bx], [ay, by], color="k", lw=2, solid_capstyle="round")
    box = _view(barrier, 0.1)
    for lo, hi in sweep or ():
        ax.plot([lo[0], hi[0]], [lo[1], hi[1]], color="#36c", lw=0.5, alpha=0.5)
    if witness is not None:
        ends = _line_in_box(witness, box)
        if ends:
            ax.plot([ends[0][0], ends[1][0]], [ends[0][1], ends[1][1]], "--", color="#d22", lw=1.2)
    ax.set_xlim(box[0], box[2])
    ax.set_ylim(box[1], box[3])
    ax.set_aspect("equal")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def lp_solution_figure(primal: Mapping[str, float], reference: Mapping[str, float], path: str) -> str:
    """Bar chart of the 39 LP variables against a reference table."""
    names = list(primal)
    xs = range(len(names))
    fig, ax = plt.subplots(figsize=(9, 3.2))
    ax.bar([x - 0.2 for x in xs], [float(primal[n]) for n in names], width=0.4, label="solver")
    ax.bar([x + 0.2 for x in xs], [float(reference[n]) for n in names], width=0.4, label="reference")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel("length")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def decomposition_figure(values: Mapping[str, float], path: str) -> str:
    """Heat map of the 3 x 13 class/region lengths."""
    classes = ["X", "Y", "Z"]
    regions = sorted({k[1:] for k in values}, key=lambda r: (r[0], r[1:]) if r != "C0" else ("D", ""))
    grid = [[values[c + r] for r in regions] for c in classes]
    fig, ax = plt.subplots(figsize=(7, 2.2))
    im = ax.imshow(grid, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(regions)))
    ax.set_xticklabels(regions, fontsize=8)
    ax.set_yticks(range(3))
    ax.set_yticklabels(classes)
    fig.colorbar(im, ax=ax, fraction=0.03)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
