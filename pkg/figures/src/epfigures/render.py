"""Deterministic rendering of figure specs to PNG files.

No numerical post-processing happens here beyond axis scaling: heatmaps and
cross sections re-grid the snapshot's cell-center columns exactly as written
by the solver.  Re-rendering the same spec over the same inputs overwrites
the output with identical bytes.
"""

from __future__ import annotations

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec, FigureSpecError, Panel, load_spec


def _load(path: Path) -> np.ndarray:
    return np.genfromtxt(path, delimiter=",", names=True)


def _pivot(data: np.ndarray, column: str):
    """Re-grid a flat 2D snapshot (C order) to (x values, y values, grid)."""
    xs = np.unique(data["x"])
    ys = np.unique(data["y"])
    grid = data[column].reshape(xs.size, ys.size)
    return xs, ys, grid


def _draw_panel(ax, panel: Panel) -> None:
    data = _load(panel.csv)
    if panel.kind in ("line", "series"):
        x = data[panel.x]
        for k, col in enumerate(panel.y):
            label = panel.labels[k] if k < len(panel.labels) else col
            ax.plot(x, data[col], lw=1.2, label=label)
        for ov in panel.overlays:
            ov_data = _load(Path(ov["csv"]))  # resolved by load_spec
            ax.plot(ov_data[panel.x], ov_data[ov["y"]], lw=1.0, ls="--",
                    label=ov.get("label", ov["y"]))
        if panel.logy:
            ax.set_yscale("log")
        if panel.logx:
            ax.set_xscale("log")
        ax.set_xlabel(panel.x)
        if len(panel.y) > 1 or panel.overlays or panel.labels:
            ax.legend(fontsize=7)
        elif panel.y:
            ax.set_ylabel(panel.y[0])
    elif panel.kind == "cross_section":
        xs, ys, grid = _pivot(data, panel.value)
        j = int(np.argmin(np.abs(ys - float(panel.at_y))))
        ax.plot(xs, grid[:, j], lw=1.2)
        ax.set_xlabel("x")
        ax.set_ylabel(f"{panel.value} at y={ys[j]:.3g}")
    elif panel.kind == "heatmap":
        xs, ys, grid = _pivot(data, panel.value)
        im = ax.imshow(
            grid.T,
            origin="lower",
            extent=(xs[0], xs[-1], ys[0], ys[-1]),
            aspect="auto",
            cmap="viridis",
        )
        ax.figure.colorbar(im, ax=ax, shrink=0.85)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    if panel.title:
        ax.set_title(panel.title, fontsize=9)


def render(spec) -> Path:
    """Render a figure spec (path, dict or FigureSpec) to its PNG output."""
    if not isinstance(spec, FigureSpec):
        spec = load_spec(spec)
    rows, cols = spec.layout
    fig, axes = plt.subplots(
        rows, cols, figsize=(3.4 * cols, 2.8 * rows), squeeze=False
    )
    try:
        for k, panel in enumerate(spec.panels):
            _draw_panel(axes[k // cols][k % cols], panel)
        for k in range(len(spec.panels), rows * cols):
            axes[k // cols][k % cols].axis("off")
        if spec.title:
            fig.suptitle(spec.title, fontsize=11)
        fig.tight_layout()
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output, dpi=110)
    finally:
        plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: ep-render <figure-spec.json>", file=sys.stderr)
        return 2
    try:
        out = render(argv[0])
    except FigureSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
