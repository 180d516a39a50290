"""Figure specifications: what to read, how to arrange it, where to write it.

A figure spec is a JSON document::

    {
      "output": "fig.png",
      "layout": [rows, cols],
      "title": "...",                     # optional
      "panels": [ {panel}, ... ]          # row-major, at most rows*cols
    }

Panel kinds and their required keys:

``line``           csv, x, y (list of column names)     1D snapshot profiles
``cross_section``  csv, value, at_y                     2D snapshot cut along x
``heatmap``        csv, value                           2D snapshot as an image
``series``         csv, x, y (list)                     step-report time series

Optional per panel: ``title``, ``labels`` (one per y column), ``logy``,
``overlays`` (list of {csv, y, label} drawn on the same axes; ``x`` reuses
the panel's x column).  Columns are validated against the CSV header before
any rendering starts, so a missing column fails by name without writing a
file.
"""

from __future__ import annotations

import csv as _csv
import json
from dataclasses import dataclass, field
from pathlib import Path

PANEL_KINDS = ("line", "cross_section", "heatmap", "series")


class FigureSpecError(ValueError):
    """Bad spec: unknown kind, missing file, or missing column."""


@dataclass(frozen=True)
class Panel:
    kind: str
    csv: Path
    x: str | None = None
    y: tuple[str, ...] = ()
    value: str | None = None
    at_y: float | None = None
    title: str = ""
    labels: tuple[str, ...] = ()
    logy: bool = False
    logx: bool = False
    overlays: tuple[dict, ...] = ()

    def required_columns(self) -> list[str]:
        cols: list[str] = []
        if self.kind in ("line", "series"):
            cols.append(self.x or "x")
            cols.extend(self.y)
        elif self.kind == "cross_section":
            cols.extend(["x", "y", self.value or ""])
        elif self.kind == "heatmap":
            cols.extend(["x", "y", self.value or ""])
        return [c for c in cols if c]


@dataclass(frozen=True)
class FigureSpec:
    output: Path
    layout: tuple[int, int]
    panels: tuple[Panel, ...]
    title: str = ""


def _read_header(path: Path) -> list[str]:
    if not path.exists():
        raise FigureSpecError(f"snapshot file not found: {path}")
    with path.open(newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureSpecError(f"empty CSV: {path}") from None
        try:
            next(reader)
        except StopIteration:
            raise FigureSpecError(f"CSV has a header but no data rows: {path}") from None
    return header


def load_spec(source) -> FigureSpec:
    """Parse and validate a spec from a JSON path or an already-loaded dict."""
    if isinstance(source, (str, Path)):
        base = Path(source).parent
        doc = json.loads(Path(source).read_text())
    else:
        base = Path(".")
        doc = source
    try:
        layout = tuple(int(v) for v in doc["layout"])
        panels_doc = doc["panels"]
        output = Path(doc["output"])
    except KeyError as exc:
        raise FigureSpecError(f"figure spec is missing key {exc}") from None
    if len(layout) != 2 or layout[0] < 1 or layout[1] < 1:
        raise FigureSpecError(f"layout must be [rows, cols], got {layout}")
    if len(panels_doc) > layout[0] * layout[1]:
        raise FigureSpecError("more panels than layout slots")

    panels = []
    for pd in panels_doc:
        kind = pd.get("kind")
        if kind not in PANEL_KINDS:
            raise FigureSpecError(f"unknown panel kind {kind!r}; choose from {PANEL_KINDS}")
        panel = Panel(
            kind=kind,
            csv=(base / pd["csv"]) if not Path(pd["csv"]).is_absolute() else Path(pd["csv"]),
            x=pd.get("x"),
            y=tuple(pd.get("y", ())) if not isinstance(pd.get("y"), str) else (pd["y"],),
            value=pd.get("value"),
            at_y=pd.get("at_y"),
            title=pd.get("title", ""),
            labels=tuple(pd.get("labels", ())),
            logy=bool(pd.get("logy", False)),
            logx=bool(pd.get("logx", False)),
            overlays=tuple(pd.get("overlays", ())),
        )
        header = _read_header(panel.csv)
        for col in panel.required_columns():
            if col not in header:
                raise FigureSpecError(
                    f"column {col!r} not found in {panel.csv} (columns: {header})"
                )
        resolved_overlays = []
        for ov in panel.overlays:
            ov_path = (base / ov["csv"]) if not Path(ov["csv"]).is_absolute() else Path(ov["csv"])
            ov_header = _read_header(ov_path)
            for col in ([panel.x] if panel.x else []) + [ov["y"]]:
                if col not in ov_header:
                    raise FigureSpecError(
                        f"column {col!r} not found in {ov_path} (columns: {ov_header})"
                    )
            resolved_overlays.append({**ov, "csv": str(ov_path)})
        panels.append(
            Panel(**{**panel.__dict__, "overlays": tuple(resolved_overlays)})
        )

    out = output if output.is_absolute() else base / output
    return FigureSpec(output=out, layout=layout, panels=tuple(panels),
                      title=doc.get("title", ""))
