"""Fully explicit collocated reference scheme with Rusanov fluxes.

All unknowns live at cell centers.  The mass flux is the Rusanov
(local Lax-Friedrichs) flux; momentum convection upwinds the cell velocity by
the sign of the mass flux, component-wise.  The potential solve is the plain
Poisson problem with the updated density.  The scheme is stable only under
dt = O(eps), which the time-step rule dt = min(cfl * h/s_max, c_eps * eps)
encodes; running it with c_eps > 1 is the standard way to witness the
stiffness the semi-implicit scheme removes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import thermo
from .diagnostics import EnergyTriple
from .elliptic import SolverConfig, assemble_potential_system, solve
from .mesh import Mesh
from .operators import _scatter_flux, div_fluxes, face_states, grad_interior
from .semi_implicit import SchemeError, cell_averages


@dataclass
class CollocatedState:
    rho: np.ndarray
    u: list[np.ndarray]   # one cell array per velocity component
    phi: np.ndarray
    t: float
    eps: float
    gamma: float

    def __post_init__(self):
        if np.any(self.rho <= 0.0):
            raise ValueError("density must be positive")

    def copy(self) -> "CollocatedState":
        return CollocatedState(
            rho=self.rho.copy(),
            u=[ui.copy() for ui in self.u],
            phi=self.phi.copy(),
            t=self.t,
            eps=self.eps,
            gamma=self.gamma,
        )


@dataclass(frozen=True)
class ClassicalConfig:
    cfl_advective: float = 0.9
    dt_eps_factor: float = 0.5      # dt <= factor * eps; > 1 provokes instability
    combined_wave_speed: bool = True  # s = |u + c| as written; else |u| + c
    solver: SolverConfig = field(default_factory=SolverConfig)


@dataclass
class ClassicalReport:
    dt: float
    active_bound: str            # "advective" or "debye"
    solver_iterations: int
    solver_residual: float
    energy: EnergyTriple
    mass: float
    max_density_deviation: float


def wave_speed(rho: np.ndarray, u_i: np.ndarray, gamma: float,
               combined: bool = True) -> np.ndarray:
    """Per-cell signal speed for one direction."""
    c = thermo.sound_speed(rho, gamma)
    if combined:
        return np.abs(u_i + c)
    return np.abs(u_i) + c


def rusanov_flux(rho_l, u_l, rho_r, u_r, gamma: float, combined: bool = True):
    """Rusanov mass flux of a left/right state pair (positive = rightward)."""
    s = np.maximum(
        wave_speed(np.asarray(rho_l, dtype=float), np.asarray(u_l, dtype=float), gamma, combined),
        wave_speed(np.asarray(rho_r, dtype=float), np.asarray(u_r, dtype=float), gamma, combined),
    )
    return 0.5 * (rho_l * u_l + rho_r * u_r) - 0.5 * s * (rho_r - rho_l)


def cell_gradient(mesh: Mesh, q: np.ndarray) -> list[np.ndarray]:
    """Collocated gradient (1/|K|) sum |sigma| q_sigma nu with face-averaged
    values; exact for affine fields on uniform grids.  Exterior faces mirror
    the cell value."""
    out = []
    for i, fs in enumerate(mesh.faces):
        ql, qr = face_states(mesh, q, i)
        flux = fs.area * 0.5 * (ql + qr)
        acc = np.zeros(mesh.n_cells)
        _scatter_flux(acc, fs, flux)
        out.append(acc / mesh.cell_volumes)
    return out


def select_dt(mesh: Mesh, state: CollocatedState, config: ClassicalConfig) -> float:
    s_max = 0.0
    for ui in state.u:
        s_max = max(
            s_max,
            float(np.max(wave_speed(state.rho, ui, state.gamma,
                                    config.combined_wave_speed))),
        )
    h_min = min(float(np.min(w)) for w in mesh.cell_widths_axis)
    dt_adv = np.inf if s_max == 0.0 else config.cfl_advective * h_min / s_max
    return min(dt_adv, config.dt_eps_factor * state.eps)


def step_classical(
    mesh: Mesh,
    state: CollocatedState,
    config: ClassicalConfig | None = None,
    dt_limit: float | None = None,
) -> tuple[CollocatedState, ClassicalReport]:
    config = config or ClassicalConfig()
    gamma, eps = state.gamma, state.eps
    dt = select_dt(mesh, state, config)
    tag = "debye" if dt == config.dt_eps_factor * eps else "advective"
    if dt_limit is not None and dt_limit < dt:
        dt, tag = dt_limit, "cap"
    if not np.isfinite(dt) or dt <= 0.0:
        raise SchemeError(f"nonpositive time step {dt}")

    p = thermo.pressure(state.rho, gamma)

    # mass fluxes per direction, zero through walls
    F = []
    for i, fs in enumerate(mesh.faces):
        rho_l, rho_r = face_states(mesh, state.rho, i)
        u_l, u_r = face_states(mesh, state.u[i], i)
        Fi = fs.area * rusanov_flux(rho_l, u_l, rho_r, u_r, gamma,
                                    config.combined_wave_speed)
        Fi[fs.exterior] = 0.0
        F.append(Fi)

    rho_new = state.rho - dt * div_fluxes(mesh, F)
    if np.any(rho_new <= 0.0):
        bad = int(np.argmin(rho_new))
        raise SchemeError(
            f"nonpositive density {rho_new[bad]:.3e} in cell {bad} at t={state.t:.6g}"
        )

    rho_face = [
        thermo.interface_density(*face_states(mesh, rho_new, i), gamma)
        for i in range(mesh.dim)
    ]
    zeros = [np.zeros(fs.n_faces) for fs in mesh.faces]
    system = assemble_potential_system(
        mesh, rho_new, zeros, p, rho_face, zeros, dt=0.0, eps=eps
    )
    sol = solve(system, config.solver)
    phi_new = sol.phi

    grad_p = cell_gradient(mesh, p)
    grad_phi = cell_gradient(mesh, phi_new)

    u_new = []
    for j in range(mesh.dim):
        conv = np.zeros(mesh.n_cells)
        for i, fs in enumerate(mesh.faces):
            u_l, u_r = face_states(mesh, state.u[j], i)
            flux = F[i] * np.where(F[i] >= 0.0, u_l, u_r)
            _scatter_flux(conv, fs, flux)
        conv /= mesh.cell_volumes
        mom = state.rho * state.u[j] - dt * (
            conv + grad_p[j] - rho_new * grad_phi[j]
        )
        u_new.append(mom / rho_new)

    new_state = CollocatedState(
        rho=rho_new, u=u_new, phi=phi_new, t=state.t + dt, eps=eps, gamma=gamma
    )
    report = ClassicalReport(
        dt=dt,
        active_bound=tag,
        solver_iterations=sol.iterations,
        solver_residual=sol.relative_residual,
        energy=energies_collocated(mesh, new_state),
        mass=float(np.sum(mesh.cell_volumes * rho_new)),
        max_density_deviation=float(np.max(np.abs(rho_new - 1.0))),
    )
    return new_state, report


def energies_collocated(mesh: Mesh, state: CollocatedState) -> EnergyTriple:
    """Energy triple with cell-weighted kinetic energy."""
    internal = float(
        np.sum(mesh.cell_volumes * thermo.relative_internal_energy(state.rho, state.gamma))
    )
    kinetic = 0.0
    for ui in state.u:
        kinetic += 0.5 * float(np.sum(mesh.cell_volumes * state.rho * ui**2))
    g_phi = grad_interior(mesh, state.phi)
    potential = 0.0
    for fs, gi in zip(mesh.faces, g_phi):
        potential += 0.5 * state.eps**2 * float(np.sum(fs.dual_volume * gi**2))
    return EnergyTriple(internal=internal, kinetic=kinetic, potential=potential)


def init_collocated(
    mesh: Mesh,
    rho0,
    u0,
    eps: float,
    gamma: float,
    solver: SolverConfig | None = None,
) -> CollocatedState:
    """Cell averages of the initial closures plus a Poisson solve for phi^0."""
    rho = cell_averages(mesh, rho0)
    if np.any(rho <= 0.0):
        raise SchemeError("initial density is nonpositive after cell averaging")
    u = [cell_averages(mesh, u0[i]) for i in range(mesh.dim)]
    rho_face = [
        thermo.interface_density(*face_states(mesh, rho, i), gamma)
        for i in range(mesh.dim)
    ]
    zeros = [np.zeros(fs.n_faces) for fs in mesh.faces]
    system = assemble_potential_system(
        mesh, rho, zeros, thermo.pressure(rho, gamma), rho_face, zeros,
        dt=0.0, eps=eps,
    )
    sol = solve(system, solver or SolverConfig())
    return CollocatedState(rho=rho, u=u, phi=sol.phi, t=0.0, eps=eps, gamma=gamma)
