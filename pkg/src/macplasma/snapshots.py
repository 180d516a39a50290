"""CSV snapshot and step-report writers plus the JSON run manifest.

Snapshot schema (bit-exact contract, one header row):
  1D: ``x,rho,u,phi``
  2D: ``x,y,rho,u,v,phi,div_u``
Face velocities are interpolated to cell centers by adjacent-face averaging
for output only; solver state stays staggered.  Floats are written with
repr-faithful 17 significant digits, so identical runs produce identical
bytes.
"""

from __future__ import annotations

import json
import platform
from pathlib import Path

import numpy as np

from . import __version__
from .classical import CollocatedState, cell_gradient
from .limit import LimitState
from .mesh import Mesh
from .operators import div, face_average_to_cells
from .semi_implicit import State

REPORT_COLUMNS = (
    "step",
    "t",
    "dt",
    "active_bound",
    "halvings",
    "solver_iterations",
    "solver_residual",
    "internal_energy",
    "kinetic_energy",
    "potential_energy",
    "total_energy",
    "mass",
    "max_density_deviation",
    "entropy_ok",
    "poisson_residual",
)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _cell_fields(mesh: Mesh, state) -> tuple[list[np.ndarray], np.ndarray]:
    """(velocity components at cell centers, div u at cells) for any state."""
    if isinstance(state, CollocatedState):
        u_c = state.u
        div_u = np.zeros(mesh.n_cells)
        for i in range(mesh.dim):
            div_u += cell_gradient(mesh, state.u[i])[i]
        return u_c, div_u
    u = state.u
    return face_average_to_cells(mesh, u), div(mesh, u)


def write_snapshot(path, mesh: Mesh, state) -> None:
    """One CSV row per cell in C order."""
    path = Path(path)
    coords = mesh.cell_center_coords()
    if isinstance(state, LimitState):
        rho = np.ones(mesh.n_cells)
        phi = state.phi
    else:
        rho = state.rho
        phi = state.phi
    u_c, div_u = _cell_fields(mesh, state)
    with path.open("w", newline="") as fh:
        if mesh.dim == 1:
            fh.write("x,rho,u,phi\n")
            for k in range(mesh.n_cells):
                fh.write(
                    ",".join(_fmt(v) for v in (coords[k, 0], rho[k], u_c[0][k], phi[k]))
                    + "\n"
                )
        else:
            fh.write("x,y,rho,u,v,phi,div_u\n")
            for k in range(mesh.n_cells):
                row = (
                    coords[k, 0],
                    coords[k, 1],
                    rho[k],
                    u_c[0][k],
                    u_c[1][k],
                    phi[k],
                    div_u[k],
                )
                fh.write(",".join(_fmt(v) for v in row) + "\n")


def report_row(step: int, t: float, report) -> dict:
    """Normalise any scheme's per-step report into the shared CSV columns."""
    energy = report.energy
    return {
        "step": step,
        "t": t,
        "dt": report.dt,
        "active_bound": getattr(report, "active_bound", ""),
        "halvings": getattr(report, "halvings", 0),
        "solver_iterations": report.solver_iterations,
        "solver_residual": report.solver_residual,
        "internal_energy": energy.internal,
        "kinetic_energy": energy.kinetic,
        "potential_energy": energy.potential,
        "total_energy": energy.total,
        "mass": getattr(report, "mass", ""),
        "max_density_deviation": getattr(report, "max_density_deviation", ""),
        "entropy_ok": getattr(report, "entropy_ok", ""),
        "poisson_residual": getattr(report, "poisson_residual", ""),
    }


def write_report_stream(path, rows: list[dict]) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in REPORT_COLUMNS) + "\n")


def write_manifest(path, config: dict, mesh: Mesh, summary: dict,
                   error: dict | None = None) -> None:
    """Config echo + mesh description + run summary as a JSON document."""
    doc = {
        "provenance": f"macplasma {__version__} (python {platform.python_version()})",
        "config": config,
        "mesh": {
            "dim": mesh.dim,
            "cells": list(mesh.shape),
            "boundary": [list(b) for b in mesh.spec.boundary],
            "domain_volume": mesh.domain_volume,
        },
        "summary": summary,
    }
    if error is not None:
        doc["error"] = error
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
