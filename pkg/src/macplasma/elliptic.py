"""Assembly and solution of the discrete elliptic problem for the potential.

Eliminating the implicit density between the stabilised mass update and the
discrete Poisson equation couples the potential to itself through the face
coefficients eps**2 + eta_sigma * dt**2 * rho_sigma**2.  Scaling row K of the
resulting operator by |K| makes the matrix symmetric; with nonnegative face
coefficients it is an M-matrix, so a diagonally preconditioned conjugate
gradient solver applies.

Dirichlet boundary faces keep their own unknowns as identity rows; their
coupling into cell rows is eliminated symmetrically into the right-hand side,
which preserves both the symmetry and the prescribed face values exactly.
Pure Neumann/periodic systems are singular with the constant null vector: the
right-hand side is projected to zero mean (after a compatibility check) and
the solution is returned with zero volume-weighted mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .mesh import FACE_DIRICHLET, FACE_NEUMANN, Mesh
from .operators import _scatter_flux, grad_interior


class EllipticError(RuntimeError):
    """Raised on solver non-convergence or incompatible right-hand sides."""


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule for the conjugate-gradient solve."""

    rtol: float = 1e-10
    max_iter_factor: int = 10       # max iterations = factor * n_unknowns
    preconditioner: str = "diagonal"  # "diagonal" or "none"

    def __post_init__(self):
        if self.rtol <= 0.0:
            raise ValueError("solver tolerance must be positive")
        if self.preconditioner not in ("diagonal", "none"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass
class PotentialSystem:
    """Sparse symmetric system over cells plus Dirichlet-face unknowns."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    n_cells: int
    singular: bool
    cell_volumes: np.ndarray
    face_counts: tuple[int, ...] = ()
    # (direction, flat face index) per unknown row beyond the cells
    dirichlet_faces: list[tuple[int, int]] = field(default_factory=list)

    @property
    def n_unknowns(self) -> int:
        return self.rhs.size


@dataclass
class SolveResult:
    phi: np.ndarray                       # cell values
    boundary: list[np.ndarray] | None     # Dirichlet face values per direction
    iterations: int
    relative_residual: float
    residual_history: np.ndarray
    converged: bool


def assemble_potential_system(
    mesh: Mesh,
    rho: np.ndarray,
    u: list[np.ndarray],
    p: np.ndarray,
    rho_face: list[np.ndarray],
    eta_face: list[np.ndarray],
    dt: float,
    eps: float,
    dirichlet_phi: list[np.ndarray] | None = None,
) -> PotentialSystem:
    """Build the |K|-scaled elliptic system for the new potential.

    Row K reads  sum_sigma c_sigma (phi_K - phi_{K_sigma}) = |K| rho_hat_K
    with c_sigma = (|sigma|^2/|D_sigma|)(eps^2 + eta_sigma dt^2 rho_sigma^2)
    and rho_hat_K = 1 - rho_K + (dt/|K|) sum_sigma |sigma| (rho_sigma u
    - eta_sigma dt rho_sigma dp)_{sigma,K}.  Neumann faces drop out (zero
    gradient); dt = 0 reduces to the plain Poisson operator eps^2 * Laplacian.
    """
    for ef in eta_face:
        if np.any(ef < 0.0):
            raise ValueError("face stabilisation coefficients must be nonnegative")
    n = mesh.n_cells
    if n == 0:
        raise ValueError("empty mesh")

    dirich: list[tuple[int, int]] = []
    for i, fs in enumerate(mesh.faces):
        for f in np.flatnonzero(fs.bc_code == FACE_DIRICHLET):
            dirich.append((i, int(f)))
    n_unknowns = n + len(dirich)
    face_unknown = {key: n + k for k, key in enumerate(dirich)}
    singular = not dirich

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    b = np.zeros(n_unknowns)

    g_p = grad_interior(mesh, p)
    for i, fs in enumerate(mesh.faces):
        coeff = (
            fs.area**2
            / fs.dual_volume
            * (eps**2 + eta_face[i] * dt**2 * rho_face[i] ** 2)
        )
        interior = fs.interior
        K = fs.left_cell[interior]
        L = fs.right_cell[interior]
        c = coeff[interior]
        rows.extend([K, L, K, L])
        cols.extend([K, L, L, K])
        vals.extend([c, c, -c, -c])

        is_dir = fs.bc_code == FACE_DIRICHLET
        if np.any(is_dir):
            if dirichlet_phi is None:
                raise ValueError("Dirichlet boundary present but no potential values given")
            for f in np.flatnonzero(is_dir):
                m = face_unknown[(i, int(f))]
                cell = int(fs.adjacent_cell()[f])
                cf = float(coeff[f])
                phi_d = float(dirichlet_phi[i][f])
                rows.append(np.array([cell, m]))
                cols.append(np.array([cell, m]))
                vals.append(np.array([cf, 1.0]))
                b[cell] += cf * phi_d
                b[m] = phi_d

        # rhs fluxes: |sigma| (rho_sigma u - eta dt rho_sigma dp); exterior
        # faces contribute nothing (u and dp vanish there)
        flux = fs.area * (rho_face[i] * u[i] - eta_face[i] * dt * rho_face[i] * g_p[i])
        flux[fs.exterior] = 0.0
        acc = np.zeros(n)
        _scatter_flux(acc, fs, flux)
        b[:n] += dt * acc

    b[:n] += mesh.cell_volumes * (1.0 - rho)

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknowns, n_unknowns),
    ).tocsr()
    return PotentialSystem(
        matrix=mat,
        rhs=b,
        n_cells=n,
        singular=singular,
        cell_volumes=mesh.cell_volumes,
        face_counts=tuple(fs.n_faces for fs in mesh.faces),
        dirichlet_faces=dirich,
    )


def _pcg(A: sp.csr_matrix, b: np.ndarray, rtol: float, maxiter: int,
         use_jacobi: bool) -> tuple[np.ndarray, int, np.ndarray]:
    """Preconditioned conjugate gradients from x0 = 0; returns residual history."""
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b), 0, np.zeros(1)
    if use_jacobi:
        m_inv = 1.0 / A.diagonal()
    else:
        m_inv = np.ones_like(b)
    x = np.zeros_like(b)
    r = b.copy()
    z = m_inv * r
    d = z.copy()
    rz = float(r @ z)
    history = [b_norm]
    for k in range(maxiter):
        Ad = A @ d
        dAd = float(d @ Ad)
        if dAd <= 0.0:
            break
        alpha = rz / dAd
        x += alpha * d
        r -= alpha * Ad
        res = float(np.linalg.norm(r))
        history.append(res)
        if res <= rtol * b_norm:
            return x, k + 1, np.asarray(history)
        z = m_inv * r
        rz_new = float(r @ z)
        d = z + (rz_new / rz) * d
        rz = rz_new
    return x, len(history) - 1, np.asarray(history)


def solve(system: PotentialSystem, config: SolverConfig | None = None) -> SolveResult:
    """Solve for the potential; projects singular systems onto their range."""
    config = config or SolverConfig()
    b = system.rhs.copy()
    n = system.n_cells

    if system.singular:
        total = float(np.sum(b[:n]))
        scale = max(1.0, float(np.sum(np.abs(b[:n]))))
        if abs(total) > 1e-10 * scale:
            raise EllipticError(
                f"incompatible right-hand side: cell sum {total:.3e} exceeds "
                f"tolerance (total mass must equal the domain volume)"
            )
        b[:n] -= total / n

    maxiter = max(1, config.max_iter_factor * system.n_unknowns)
    # the Dirichlet-face block is a decoupled identity: assign it exactly and
    # run conjugate gradients on the cell block only
    x_faces = b[n:].copy()
    A_cells = system.matrix[:n, :n] if b.size > n else system.matrix
    x_cells, iters, history = _pcg(
        A_cells, b[:n], config.rtol, maxiter, config.preconditioner == "diagonal"
    )
    x = np.concatenate([x_cells, x_faces])
    b_norm = float(np.linalg.norm(b[:n]))
    rel = history[-1] / b_norm if b_norm > 0.0 else 0.0
    converged = b_norm == 0.0 or rel <= config.rtol
    if not converged:
        raise EllipticError(
            f"conjugate gradients did not converge in {iters} iterations "
            f"(relative residual {rel:.3e})"
        )

    phi = x[:n]
    if system.singular:
        phi = phi - np.sum(system.cell_volumes * phi) / np.sum(system.cell_volumes)

    boundary = None
    if system.dirichlet_faces:
        boundary = [np.zeros(count) for count in system.face_counts]
        for k, (d, f) in enumerate(system.dirichlet_faces):
            boundary[d][f] = x[n + k]

    return SolveResult(
        phi=phi,
        boundary=boundary,
        iterations=iters,
        relative_residual=float(rel),
        residual_history=history,
        converged=converged,
    )


@dataclass(frozen=True)
class MMatrixReport:
    diagonal_positive: bool
    offdiagonal_nonpositive: bool
    diagonally_dominant: bool
    max_positive_offdiagonal: float
    max_dominance_violation: float

    @property
    def is_m_matrix(self) -> bool:
        return (
            self.diagonal_positive
            and self.offdiagonal_nonpositive
            and self.diagonally_dominant
        )


def is_m_matrix(system: PotentialSystem, tol: float = 0.0) -> MMatrixReport:
    """Check sign pattern and row-wise diagonal dominance of the assembly."""
    A = system.matrix.tocoo()
    diag = system.matrix.diagonal()
    off = A.row != A.col
    off_vals = A.data[off]
    max_pos_off = float(off_vals.max(initial=0.0))
    offdiag_sum = np.zeros(system.n_unknowns)
    np.add.at(offdiag_sum, A.row[off], np.abs(off_vals))
    dominance = diag - offdiag_sum
    scale = float(np.abs(A.data).max(initial=1.0))
    return MMatrixReport(
        diagonal_positive=bool(np.all(diag > 0.0)),
        offdiagonal_nonpositive=bool(max_pos_off <= tol * scale),
        diagonally_dominant=bool(np.all(dominance >= -max(tol, 1e-13) * scale)),
        max_positive_offdiagonal=max_pos_off,
        max_dominance_violation=float(max(0.0, -dominance.min(initial=0.0))),
    )


def dump_matrix(system: PotentialSystem, path) -> None:
    """Write the matrix in coordinate text format: row col value."""
    A = system.matrix.tocoo()
    with open(path, "w") as fh:
        for r, c, v in zip(A.row, A.col, A.data):
            fh.write(f"{r} {c} {v:.17g}\n")
