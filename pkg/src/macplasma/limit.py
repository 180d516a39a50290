"""Formal Debye-length -> 0 limit: a projection-type scheme for the
stabilised incompressible Euler system.

With unit density the semi-implicit scheme collapses to: solve
-eta * dt * Lap(phi) = div(u), shift the mass flux by Q = -eta dt grad(phi)
(making div(u - Q) vanish to solver tolerance), convect the velocity with the
shifted flux and apply the potential/divergence source.  The update mirrors
the momentum equation of the eps > 0 scheme specialised to rho = 1, so a
semi-implicit step at tiny eps from well-prepared data reproduces this one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import EnergyTriple, velocity_l2
from .elliptic import SolverConfig, assemble_potential_system, solve
from .mesh import Mesh
from .operators import (
    div_fluxes,
    dual_fluxes,
    grad_interior,
    upwind_convect,
)
from .semi_implicit import SchemeError, _cfl_bounds, compute_C, dual_cell_averages


@dataclass
class LimitState:
    u: list[np.ndarray]
    phi: np.ndarray
    t: float

    def copy(self) -> "LimitState":
        return LimitState(u=[ui.copy() for ui in self.u], phi=self.phi.copy(), t=self.t)


@dataclass(frozen=True)
class LimitConfig:
    eta: float = 1.5
    alpha: float = 2.0
    gamma: float = 2.0       # enters only through the shift constant C
    cfl_safety: float = 0.9
    c_margin: float = 1.1
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not self.eta > 1.25:
            raise ValueError("stabilisation constant eta must exceed 5/4")
        if self.alpha < 2.0:
            raise ValueError("potential-shift constant alpha must be >= 2")


@dataclass
class LimitReport:
    dt: float
    solver_iterations: int
    solver_residual: float
    divergence_constraint: float   # max |div(u^n - Q^{n+1})|
    kinetic: float

    @property
    def energy(self) -> EnergyTriple:
        # density is identically 1: the total energy is purely kinetic
        return EnergyTriple(internal=0.0, kinetic=self.kinetic, potential=0.0)


def compute_dt_limit(mesh: Mesh, state: LimitState, config: LimitConfig) -> float:
    """Time-step bounds of the eps > 0 scheme evaluated at unit density."""
    ones_c = np.ones(mesh.n_cells)
    ones_f = [np.ones(fs.n_faces) for fs in mesh.faces]
    C = compute_C(ones_c, config.gamma, config.c_margin)
    adv, stab = _cfl_bounds(
        mesh, ones_c, state.u, ones_c, ones_f, state.phi, ones_f, C, config.eta
    )
    dt = config.cfl_safety * min(adv, stab)
    if not np.isfinite(dt) or dt <= 0.0:
        raise SchemeError(f"nonpositive time step {dt}")
    return dt


def step_limit(
    mesh: Mesh,
    state: LimitState,
    dt: float,
    config: LimitConfig | None = None,
) -> tuple[LimitState, LimitReport]:
    config = config or LimitConfig()
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    # the eps = 0, rho = 1 specialisation of the reformulated elliptic problem
    ones_c = np.ones(mesh.n_cells)
    ones_f = [np.ones(fs.n_faces) for fs in mesh.faces]
    eta_f = [config.eta * of for of in ones_f]
    system = assemble_potential_system(
        mesh, ones_c, state.u, ones_c, ones_f, eta_f, dt, eps=0.0
    )
    sol = solve(system, config.solver)
    phi_new = sol.phi

    g_phi = grad_interior(mesh, phi_new)
    Q = [-config.eta * dt * gp for gp in g_phi]
    F = [mesh.faces[i].area * (state.u[i] - Q[i]) for i in range(mesh.dim)]
    constraint = float(np.max(np.abs(div_fluxes(mesh, F))))

    C = compute_C(ones_c, config.gamma, config.c_margin)
    div_u = div_fluxes(mesh, [mesh.faces[i].area * state.u[i] for i in range(mesh.dim)])
    Lam = -config.alpha * dt * C * div_u
    g_lam = grad_interior(mesh, Lam)

    u_new = []
    for i, fs in enumerate(mesh.faces):
        F_dual = dual_fluxes(mesh, F, i)
        conv = upwind_convect(mesh, F_dual, state.u[i], i)
        ui = state.u[i] - dt * conv / fs.dual_volume + dt * (g_phi[i] - g_lam[i])
        ui[fs.exterior] = 0.0
        u_new.append(ui)

    new_state = LimitState(u=u_new, phi=phi_new, t=state.t + dt)
    report = LimitReport(
        dt=dt,
        solver_iterations=sol.iterations,
        solver_residual=sol.relative_residual,
        divergence_constraint=constraint,
        kinetic=0.5 * velocity_l2(mesh, u_new) ** 2,
    )
    return new_state, report


def init_limit(mesh: Mesh, u0) -> LimitState:
    """Dual-cell averages of the initial velocity closures; zero potential."""
    u = [dual_cell_averages(mesh, i, u0[i]) for i in range(mesh.dim)]
    return LimitState(u=u, phi=np.zeros(mesh.n_cells), t=0.0)
