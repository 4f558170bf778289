"""Rendering of curve pairs and their matchings to figure files."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .morphing import Morphing


def _planar(vertices: np.ndarray) -> np.ndarray:
    """First two coordinates; 1-d curves are drawn on the x-axis."""
    if vertices.shape[1] == 1:
        return np.column_stack([vertices[:, 0], np.zeros(len(vertices))])
    return vertices[:, :2]


def render_matching(m: Morphing, path, title: str | None = None, max_leashes: int = 400):
    """Draw both curves plus leash segments at morphing vertices.

    ``path`` decides the output format by extension (matplotlib backends;
    .svg produces SVG 1.1).  Long morphings are subsampled to at most
    ``max_leashes`` leashes to keep files readable.
    """
    a, b = m.curve_a, m.curve_b
    pa = _planar(a.points_at(m.points[:, 0]))
    pb = _planar(b.points_at(m.points[:, 1]))
    fig, ax = plt.subplots(figsize=(8, 6))
    step = max(1, len(m.points) // max_leashes)
    for k in range(0, len(m.points), step):
        ax.plot(
            [pa[k, 0], pb[k, 0]],
            [pa[k, 1], pb[k, 1]],
            color="0.75",
            lw=0.6,
            zorder=1,
        )
    va, vb = _planar(a.vertices), _planar(b.vertices)
    ax.plot(va[:, 0], va[:, 1], "-o", color="tab:blue", ms=2, lw=1.2, zorder=2)
    ax.plot(vb[:, 0], vb[:, 1], "-o", color="tab:red", ms=2, lw=1.2, zorder=2)
    ax.set_aspect("equal", adjustable="datalim")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
