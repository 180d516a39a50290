"""Discrete differential and convection operators on MAC meshes.

Cell fields are flat arrays of length ``mesh.n_cells``; face fields are one
flat array per direction, stored with the global +e_i orientation.  Velocity
fields are zero on exterior faces (no-flux walls); the helpers here keep that
convention.
"""

from __future__ import annotations

import numpy as np

from .mesh import FACE_DIRICHLET, FACE_NEUMANN, Mesh


def zero_exterior(mesh: Mesh, v: list[np.ndarray]) -> list[np.ndarray]:
    """Return copies of the face fields with exterior faces forced to zero."""
    out = []
    for fs, vi in zip(mesh.faces, v):
        w = np.array(vi, dtype=float, copy=True)
        w[fs.exterior] = 0.0
        out.append(w)
    return out


def dual_average(mesh: Mesh, q: np.ndarray) -> list[np.ndarray]:
    """Face value q_{D_sigma} with |D_sigma| q_D = |D_{s,K}| q_K + |D_{s,L}| q_L.

    Exterior faces carry the adjacent cell value (single half cell).
    """
    out = []
    for fs in mesh.faces:
        qk = q[np.maximum(fs.left_cell, 0)]
        ql = q[np.maximum(fs.right_cell, 0)]
        num = fs.half_left * np.where(fs.left_cell >= 0, qk, 0.0) + fs.half_right * np.where(
            fs.right_cell >= 0, ql, 0.0
        )
        out.append(num / fs.dual_volume)
    return out


def face_states(mesh: Mesh, q: np.ndarray, direction: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-face (left, right) cell values; exterior faces mirror the adjacent cell."""
    fs = mesh.faces[direction]
    adj = q[fs.adjacent_cell()]
    left = np.where(fs.left_cell >= 0, q[np.maximum(fs.left_cell, 0)], adj)
    right = np.where(fs.right_cell >= 0, q[np.maximum(fs.right_cell, 0)], adj)
    return left, right


def grad(
    mesh: Mesh,
    q: np.ndarray,
    dirichlet: list[np.ndarray] | None = None,
) -> list[np.ndarray]:
    """Discrete gradient: (|sigma|/|D_sigma|)(q_right - q_left) per face.

    Zero on Neumann exterior faces.  On Dirichlet exterior faces the missing
    cell value is replaced by the prescribed face average, which must be
    supplied via ``dirichlet`` (per-direction face arrays, read only there).
    """
    out = []
    for i, fs in enumerate(mesh.faces):
        ql = q[np.maximum(fs.left_cell, 0)]
        qr = q[np.maximum(fs.right_cell, 0)]
        is_dir = fs.bc_code == FACE_DIRICHLET
        if np.any(is_dir):
            if dirichlet is None:
                raise ValueError("Dirichlet faces present but no boundary values given")
            qd = dirichlet[i]
            ql = np.where(is_dir & (fs.left_cell < 0), qd, ql)
            qr = np.where(is_dir & (fs.right_cell < 0), qd, qr)
        g = fs.area / fs.dual_volume * (qr - ql)
        g[fs.bc_code == FACE_NEUMANN] = 0.0
        out.append(g)
    return out


def grad_interior(mesh: Mesh, q: np.ndarray) -> list[np.ndarray]:
    """Discrete gradient forced to zero on every exterior face.

    Used for fields without boundary data (pressure, potential shift): no-flux
    walls carry no pressure gradient in the fluxes.
    """
    out = []
    for fs in mesh.faces:
        ql = q[np.maximum(fs.left_cell, 0)]
        qr = q[np.maximum(fs.right_cell, 0)]
        g = fs.area / fs.dual_volume * (qr - ql)
        g[fs.exterior] = 0.0
        out.append(g)
    return out


def div(mesh: Mesh, v: list[np.ndarray]) -> np.ndarray:
    """Discrete divergence: (1/|K|) sum over faces of |sigma| v_{sigma,K}."""
    acc = np.zeros(mesh.n_cells)
    for fs, vi in zip(mesh.faces, v):
        flux = fs.area * vi
        _scatter_flux(acc, fs, flux)
    return acc / mesh.cell_volumes


def div_fluxes(mesh: Mesh, F: list[np.ndarray]) -> np.ndarray:
    """(1/|K|) sum of oriented face fluxes F_{sigma,K}; F already includes |sigma|."""
    acc = np.zeros(mesh.n_cells)
    for fs, Fi in zip(mesh.faces, F):
        _scatter_flux(acc, fs, Fi)
    return acc / mesh.cell_volumes


def _scatter_flux(acc: np.ndarray, fs, flux: np.ndarray) -> None:
    # a face with global value F contributes +F to its left cell (outward +e_i)
    # and -F to its right cell
    has_left = fs.left_cell >= 0
    has_right = fs.right_cell >= 0
    acc += np.bincount(fs.left_cell[has_left], weights=flux[has_left], minlength=acc.size)
    acc -= np.bincount(fs.right_cell[has_right], weights=flux[has_right], minlength=acc.size)


def laplacian(
    mesh: Mesh, q: np.ndarray, dirichlet: list[np.ndarray] | None = None
) -> np.ndarray:
    """Discrete Laplacian div(grad(q))."""
    return div(mesh, grad(mesh, q, dirichlet=dirichlet))


def dual_fluxes(mesh: Mesh, F: list[np.ndarray], direction: int) -> np.ndarray:
    """Fluxes across the dual-cell edges of the direction-i faces.

    ``F`` holds the primal mass fluxes of every direction in global
    orientation.  Returns (n_faces, 2*dim) with F_{eps,sigma} per edge slot;
    boundary dual edges are zero.  The half-sum composition makes the dual
    mass balance an exact algebraic consequence of the primal one.
    """
    fs = mesh.faces[direction]
    out = np.zeros_like(fs.edge_sign)
    for s in range(fs.edge_sign.shape[1]):
        Fj = F[fs.edge_dir[s]]
        out[:, s] = 0.5 * fs.edge_sign[:, s] * (
            Fj[fs.edge_comp_a[:, s]] + Fj[fs.edge_comp_b[:, s]]
        )
    return out


def upwind_convect(
    mesh: Mesh, F_dual: np.ndarray, u: np.ndarray, direction: int
) -> np.ndarray:
    """Sum over dual edges of F_{eps,sigma} * u_{eps,up} per direction-i face.

    The upwind value is u_sigma where the dual flux leaves the cell
    (F_{eps,sigma} >= 0) and the neighbour value otherwise.
    """
    fs = mesh.faces[direction]
    acc = np.zeros(fs.n_faces)
    for s in range(F_dual.shape[1]):
        Fe = F_dual[:, s]
        up = np.where(Fe >= 0.0, u, u[fs.edge_neighbor[:, s]])
        acc += Fe * up
    return acc


def face_average_to_cells(mesh: Mesh, v: list[np.ndarray]) -> list[np.ndarray]:
    """Cell-centered velocity components by averaging the two adjacent faces."""
    out = []
    for i, fs in enumerate(mesh.faces):
        cf = mesh.cell_faces[i]
        out.append(0.5 * (v[i][cf[:, 0]] + v[i][cf[:, 1]]))
    return out
