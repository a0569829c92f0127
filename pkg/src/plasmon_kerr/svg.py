"""Optional static heatmap of a spatial map (matplotlib, imported on demand)."""
from __future__ import annotations

import io

import numpy as np


def render_heatmap(smap, title: str = "") -> str:
    """SVG text: linear colour scale over [min, max] with both values annotated."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "plasmon-kerr"
    vals = np.asarray(smap.values, dtype=float)
    vmin, vmax = float(np.min(vals)), float(np.max(vals))
    if vmax == vmin:
        vmax = vmin + 1e-300
    h = smap.grid.half_extent
    fig, ax = plt.subplots(figsize=(5, 4.2))
    img = ax.imshow(vals, origin="lower", extent=(-h, h, -h, h), cmap="viridis",
                    vmin=vmin, vmax=vmax, interpolation="nearest")
    fig.colorbar(img, ax=ax, label=smap.quantity)
    ax.set_xlabel("x / w")
    ax.set_ylabel("y / w")
    ax.set_title(title or smap.quantity)
    ax.text(0.01, -0.16, f"min={np.min(vals):.6g}  max={np.max(vals):.6g}",
            transform=ax.transAxes, fontsize=8)
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()
