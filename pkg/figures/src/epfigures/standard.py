"""Builders for the standard experiment figure sets.

Each builder maps solver output directories (snapshots named
``snapshot_###.csv`` in output-time order, plus ``steps.csv``) to a figure
spec; ``ep-make-figures`` renders every set whose inputs are supplied.

The six experiment sets:

1. ``qn1d_t1``       1D quasineutral perturbation at the first output time
2. ``qn1d_t2``       ... at the second output time
3. ``maxwell_eps``   1D density perturbation, amplitude eps
4. ``maxwell_eps2``  1D density perturbation, amplitude eps^2
5. ``column``        plasma column: 3x3 cross-section grid over one period
6. ``qn2d``          2D quasineutral state: density/potential/divergence maps

plus two summary sets: ``energy`` (total energy vs time) and ``dt_vs_eps``
(selected time step across a Debye-length sweep).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figspec import FigureSpecError
from .render import render

_1D_VARS = (("rho", "density"), ("u", "velocity"), ("phi", "potential"))


def _snap(run_dir: Path, index: int) -> Path:
    path = Path(run_dir) / f"snapshot_{index:03d}.csv"
    if not path.exists():
        raise FigureSpecError(f"missing snapshot: {path}")
    return path


def profiles_1d(run_dir, out_path, snapshot_index: int, title: str,
                overlay_dir=None, overlay_label: str = "reference") -> dict:
    """Three-panel density/velocity/potential line figure, optional overlay."""
    snap = _snap(Path(run_dir), snapshot_index)
    panels = []
    for col, label in _1D_VARS:
        panel = {
            "kind": "line",
            "csv": str(snap),
            "x": "x",
            "y": [col],
            "title": label,
        }
        if overlay_dir is not None:
            panel["labels"] = ["semi-implicit"]
            panel["overlays"] = [
                {"csv": str(_snap(Path(overlay_dir), snapshot_index)),
                 "y": col, "label": overlay_label}
            ]
        panels.append(panel)
    return {"output": str(out_path), "layout": [1, 3], "panels": panels,
            "title": title}


def column_grid(run_dir, out_path, at_y: float = 0.5) -> dict:
    """3x3 grid: rows = times (0, tp/2, tp), columns = rho, u, phi cuts."""
    run_dir = Path(run_dir)
    panels = []
    for row, tag in enumerate(("t = 0", "t = tp/2", "t = tp")):
        snap = _snap(run_dir, row)
        for col, label in _1D_VARS:
            panels.append({
                "kind": "cross_section",
                "csv": str(snap),
                "value": col,
                "at_y": at_y,
                "title": f"{label}, {tag}",
            })
    return {"output": str(out_path), "layout": [3, 3], "panels": panels,
            "title": "plasma column oscillation"}


def qn2d_maps(run_dir, out_path) -> dict:
    """Heatmaps of density, potential and velocity divergence per output time."""
    run_dir = Path(run_dir)
    snaps = sorted(run_dir.glob("snapshot_*.csv"))
    if not snaps:
        raise FigureSpecError(f"no snapshots in {run_dir}")
    panels = []
    for k, snap in enumerate(snaps):
        for col, label in (("rho", "density"), ("phi", "potential"),
                           ("div_u", "div u")):
            panels.append({
                "kind": "heatmap",
                "csv": str(snap),
                "value": col,
                "title": f"{label} (output {k})",
            })
    return {"output": str(out_path), "layout": [len(snaps), 3], "panels": panels,
            "title": "2D quasineutral perturbation"}


def energy_series(run_dirs: dict, out_path) -> dict:
    """Total energy vs time, one panel per run."""
    panels = []
    for name, run_dir in run_dirs.items():
        steps = Path(run_dir) / "steps.csv"
        if not steps.exists():
            raise FigureSpecError(f"missing step report: {steps}")
        panels.append({
            "kind": "series",
            "csv": str(steps),
            "x": "t",
            "y": ["total_energy"],
            "title": name,
        })
    rows = (len(panels) + 2) // 3
    return {"output": str(out_path), "layout": [rows, min(3, len(panels))],
            "panels": panels, "title": "total energy vs time"}


def dt_vs_eps(summary_csv, out_path) -> dict:
    """Selected time step across a Debye-length sweep (log-log)."""
    return {
        "output": str(out_path),
        "layout": [1, 1],
        "panels": [{
            "kind": "series",
            "csv": str(summary_csv),
            "x": "eps",
            "y": ["dt_max", "dt_min"],
            "labels": ["dt max", "dt min"],
            "logx": True,
            "logy": True,
            "title": "time step vs Debye length",
        }],
    }


def build_all(args, out_dir: Path) -> list[tuple[str, dict]]:
    specs: list[tuple[str, dict]] = []
    # snapshot_000 is the initial state; outputs start at index 1
    if args.qn1d:
        specs.append(("qn1d_t1", profiles_1d(
            args.qn1d, out_dir / "qn1d_t1.png", 1,
            "1D quasineutral perturbation, first output",
            overlay_dir=args.qn1d_classical, overlay_label="classical")))
        specs.append(("qn1d_t2", profiles_1d(
            args.qn1d, out_dir / "qn1d_t2.png", 2,
            "1D quasineutral perturbation, second output",
            overlay_dir=args.qn1d_classical, overlay_label="classical")))
    if args.maxwell_eps:
        specs.append(("maxwell_eps", profiles_1d(
            args.maxwell_eps, out_dir / "maxwell_eps.png", 1,
            "1D density perturbation, amplitude eps")))
    if args.maxwell_eps2:
        specs.append(("maxwell_eps2", profiles_1d(
            args.maxwell_eps2, out_dir / "maxwell_eps2.png", 1,
            "1D density perturbation, amplitude eps^2")))
    if args.column:
        specs.append(("column", column_grid(args.column, out_dir / "column.png")))
    if args.qn2d:
        specs.append(("qn2d", qn2d_maps(args.qn2d, out_dir / "qn2d.png")))
    if args.energy:
        runs = {Path(d).name: d for d in args.energy}
        specs.append(("energy", energy_series(runs, out_dir / "energy.png")))
    if args.sweep_summary:
        specs.append(("dt_vs_eps", dt_vs_eps(args.sweep_summary,
                                             out_dir / "dt_vs_eps.png")))
    return specs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ep-make-figures",
        description="Render the standard figure sets from solver CSV artifacts",
    )
    parser.add_argument("--qn1d", help="qn1d run directory (semi-implicit)")
    parser.add_argument("--qn1d-classical", dest="qn1d_classical",
                        help="qn1d run directory of the classical scheme (overlay)")
    parser.add_argument("--maxwell-eps", dest="maxwell_eps")
    parser.add_argument("--maxwell-eps2", dest="maxwell_eps2")
    parser.add_argument("--column")
    parser.add_argument("--qn2d")
    parser.add_argument("--energy", nargs="*", default=(),
                        help="run directories for the energy-vs-time summary")
    parser.add_argument("--sweep-summary", dest="sweep_summary",
                        help="summary.csv of a Debye-length sweep")
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    out_dir = Path(args.out)
    try:
        specs = build_all(args, out_dir)
        if not specs:
            print("nothing to do: no input runs given", file=sys.stderr)
            return 2
        for name, spec in specs:
            path = render(spec)
            print(f"{name} -> {path}")
    except FigureSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
