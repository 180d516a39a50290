"""Semi-implicit, energy-stable stepper for the Euler-Poisson system.

One step solves an elliptic problem for the new potential, then evaluates the
density and velocity updates explicitly.  The mass flux carries a momentum
shift Q proportional to the combined pressure gradient and electrostatic
source; the momentum source uses a shifted potential phi - Lambda with Lambda
proportional to the divergence of the momentum.  Both shifts together make
the discrete total energy non-increasing under the time-step bounds enforced
by :func:`compute_dt` and the a-posteriori re-check in :func:`step`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import operators, thermo
from .diagnostics import EnergyTriple, energies, total_mass
from .elliptic import SolverConfig, assemble_potential_system, solve
from .mesh import Mesh
from .operators import (
    div,
    div_fluxes,
    dual_average,
    dual_fluxes,
    face_states,
    grad,
    grad_interior,
    upwind_convect,
)

_GAUSS_NODES = np.array([-np.sqrt(3.0 / 5.0), 0.0, np.sqrt(3.0 / 5.0)])
_GAUSS_WEIGHTS = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]) / 2.0


class SchemeError(RuntimeError):
    """Raised when a step fails (positivity loss, CFL retry exhaustion)."""


@dataclass
class State:
    """Staggered state: cell density and potential, face velocity components."""

    rho: np.ndarray
    u: list[np.ndarray]
    phi: np.ndarray
    t: float
    eps: float
    gamma: float

    def __post_init__(self):
        if np.any(self.rho <= 0.0):
            raise ValueError("density must be positive")
        if not 0.0 < self.eps <= 1.0:
            raise ValueError("Debye length must lie in (0, 1]")
        if self.gamma < 1.0:
            raise ValueError("adiabatic exponent must be >= 1")

    def copy(self) -> "State":
        return State(
            rho=self.rho.copy(),
            u=[ui.copy() for ui in self.u],
            phi=self.phi.copy(),
            t=self.t,
            eps=self.eps,
            gamma=self.gamma,
        )


@dataclass(frozen=True)
class APConfig:
    """Stabilisation constants and solver settings for the AP scheme.

    eta must exceed 5/4 and alpha must be at least 2 for the energy estimate
    to hold; the defaults are the smallest round admissible values.
    """

    eta: float = 1.5
    alpha: float = 2.0
    cfl_safety: float = 0.9
    c_margin: float = 1.1
    max_dt: float | None = None
    max_halvings: int = 10
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not self.eta > 1.25:
            raise ValueError("stabilisation constant eta must exceed 5/4")
        if self.alpha < 2.0:
            raise ValueError("potential-shift constant alpha must be >= 2")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError("CFL safety factor must lie in (0, 1]")


@dataclass
class StepReport:
    dt: float
    active_bound: str            # "advective", "stabilization" or "cap"
    halvings: int
    solver_iterations: int
    solver_residual: float
    energy: EnergyTriple
    mass: float
    max_density_deviation: float
    entropy_ok: bool
    poisson_residual: float
    # logged, not enforced: max rho^n_D / rho^{n+1}_D (<= 5/4 under the CFL)
    # and whether eta/rho^n_D >= 1/rho^{n+1}_D held on every face
    max_dual_density_ratio: float = 0.0
    eta_condition_ok: bool = True


def compute_C(rho: np.ndarray, gamma: float, margin: float = 1.1) -> float:
    """Upper bound (with margin) of psi'' = gamma rho**(gamma-2) over the state.

    The bound is attained at max(rho) for gamma >= 2 and at min(rho) below.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise ValueError("density must be positive")
    extremum = float(np.max(rho)) if gamma >= 2.0 else float(np.min(rho))
    return margin * gamma * extremum ** (gamma - 2.0)


def eta_faces(rho_dual: list[np.ndarray], eta: float) -> list[np.ndarray]:
    """Per-face stabilisation coefficients eta / rho_{D_sigma}."""
    if not eta > 1.25:
        raise ValueError("stabilisation constant eta must exceed 5/4")
    out = []
    for rd in rho_dual:
        if np.any(rd <= 0.0):
            raise ValueError("dual density must be positive")
        out.append(eta / rd)
    return out


def _cfl_bounds(
    mesh: Mesh,
    rho: np.ndarray,
    u: list[np.ndarray],
    p: np.ndarray,
    rho_face: list[np.ndarray],
    phi: np.ndarray,
    rho_dual: list[np.ndarray],
    C: float,
    eta: float,
) -> tuple[float, float]:
    """Most restrictive (advective, stabilisation) time-step bounds.

    advective: dt * max(|dK|/|K|, |dL|/|L|) * (|u| + sqrt(eta) sqrt(|p_L-p_K|
    + rho_sigma |phi_L-phi_K|)) <= min(1, mu/5) per interior face, with
    mu = min(rho_K, rho_L)/rho_sigma.
    stabilisation: dt <= (rho_D / a_sigma)**0.5 / 4 with
    a_sigma = (2C/Delta_sigma)(|sigma|/|D_sigma|) rho_sigma**2.
    """
    ratio = mesh.cell_perimeters / mesh.cell_volumes
    bound_adv = np.inf
    bound_stab = np.inf
    for i, fs in enumerate(mesh.faces):
        interior = fs.interior
        K = fs.left_cell[interior]
        L = fs.right_cell[interior]
        rmax = np.maximum(ratio[K], ratio[L])
        p_jump = np.abs(p[L] - p[K])
        phi_jump = np.abs(phi[L] - phi[K])
        rs = rho_face[i][interior]
        speed = np.abs(u[i][interior]) + np.sqrt(eta) * np.sqrt(p_jump + rs * phi_jump)
        mu = np.minimum(rho[K], rho[L]) / rs
        rhs = np.minimum(1.0, mu / 5.0)
        with np.errstate(divide="ignore"):
            ba = np.where(speed > 0.0, rhs / (rmax * speed), np.inf)
        bound_adv = min(bound_adv, float(np.min(ba, initial=np.inf)))

        a = 2.0 * C * fs.delta_inv[interior] * fs.area[interior] / fs.dual_volume[
            interior
        ] * rs**2
        bs = 0.25 * np.sqrt(rho_dual[i][interior] / a)
        bound_stab = min(bound_stab, float(np.min(bs, initial=np.inf)))
    return bound_adv, bound_stab


def compute_dt(
    mesh: Mesh,
    state: State,
    phi_pred: np.ndarray,
    C: float,
    eta: float,
    safety: float,
    cap: float | None = None,
) -> tuple[float, str]:
    """Select dt from the two sufficient bounds, using the lagged potential
    in place of the unknown new one (verified a posteriori by the stepper)."""
    p = thermo.pressure(state.rho, state.gamma)
    rho_face = [
        thermo.interface_density(*face_states(mesh, state.rho, i), state.gamma)
        for i in range(mesh.dim)
    ]
    rho_dual = dual_average(mesh, state.rho)
    adv, stab = _cfl_bounds(
        mesh, state.rho, state.u, p, rho_face, phi_pred, rho_dual, C, eta
    )
    dt = safety * min(adv, stab)
    tag = "advective" if adv <= stab else "stabilization"
    if cap is not None and cap < dt:
        dt, tag = cap, "cap"
    if not np.isfinite(dt) or dt <= 0.0:
        raise SchemeError(f"nonpositive time step {dt}")
    return dt, tag


def _advance(mesh: Mesh, state: State, dt: float, config: APConfig, C: float):
    """One candidate step at fixed dt; returns (new state, step internals)."""
    gamma, eps = state.gamma, state.eps
    p = thermo.pressure(state.rho, gamma)
    rho_face = [
        thermo.interface_density(*face_states(mesh, state.rho, i), gamma)
        for i in range(mesh.dim)
    ]
    rho_dual = dual_average(mesh, state.rho)
    eta_f = eta_faces(rho_dual, config.eta)

    system = assemble_potential_system(
        mesh, state.rho, state.u, p, rho_face, eta_f, dt, eps
    )
    sol = solve(system, config.solver)
    phi_new = sol.phi

    g_p = grad_interior(mesh, p)
    g_phi = (
        grad(mesh, phi_new, dirichlet=sol.boundary)
        if sol.boundary is not None
        else grad_interior(mesh, phi_new)
    )

    Q = [
        eta_f[i] * dt * rho_face[i] * (g_p[i] - rho_face[i] * g_phi[i])
        for i in range(mesh.dim)
    ]
    F = [mesh.faces[i].area * (rho_face[i] * state.u[i] - Q[i]) for i in range(mesh.dim)]

    rho_new = state.rho - dt * div_fluxes(mesh, F)
    if np.any(rho_new <= 0.0):
        bad = int(np.argmin(rho_new))
        raise SchemeError(
            f"nonpositive density {rho_new[bad]:.3e} in cell {bad} at t={state.t:.6g}"
        )

    mass_div = div_fluxes(
        mesh, [mesh.faces[i].area * rho_face[i] * state.u[i] for i in range(mesh.dim)]
    )
    Lam = -config.alpha * dt * C * mass_div
    g_lam = grad_interior(mesh, Lam)

    rho_dual_new = dual_average(mesh, rho_new)
    u_new = []
    for i, fs in enumerate(mesh.faces):
        F_dual = dual_fluxes(mesh, F, i)
        conv = upwind_convect(mesh, F_dual, state.u[i], i)
        mom = rho_dual[i] * state.u[i] - dt * (
            conv / fs.dual_volume + g_p[i] - rho_face[i] * (g_phi[i] - g_lam[i])
        )
        ui = mom / rho_dual_new[i]
        ui[fs.exterior] = 0.0
        u_new.append(ui)

    new_state = State(
        rho=rho_new, u=u_new, phi=phi_new, t=state.t + dt, eps=eps, gamma=gamma
    )
    internals = {
        "p": p,
        "rho_face": rho_face,
        "rho_dual": rho_dual,
        "rho_dual_new": rho_dual_new,
        "solution": sol,
        "boundary": sol.boundary,
    }
    return new_state, internals


def poisson_residual(mesh: Mesh, state: State,
                     boundary: list[np.ndarray] | None = None) -> float:
    """max_K |eps^2 (Lap phi)_K - (rho_K - 1)|."""
    lap = div(
        mesh,
        grad(mesh, state.phi, dirichlet=boundary)
        if boundary is not None
        else grad_interior(mesh, state.phi),
    )
    return float(np.max(np.abs(state.eps**2 * lap - (state.rho - 1.0))))


def step(
    mesh: Mesh, state: State, config: APConfig | None = None, dt_limit: float | None = None
) -> tuple[State, StepReport]:
    """Advance one time step; retries with halved dt if the a-posteriori CFL
    check (with the actual new potential and dual density) fails."""
    config = config or APConfig()
    C = compute_C(state.rho, state.gamma, config.c_margin)
    cap = config.max_dt
    if dt_limit is not None:
        cap = dt_limit if cap is None else min(cap, dt_limit)
    dt, tag = compute_dt(
        mesh, state, state.phi, C, config.eta, config.cfl_safety, cap=cap
    )

    e_old = energies(mesh, state).total
    p = thermo.pressure(state.rho, state.gamma)
    rho_face = [
        thermo.interface_density(*face_states(mesh, state.rho, i), state.gamma)
        for i in range(mesh.dim)
    ]

    halvings = 0
    while True:
        new_state, internals = _advance(mesh, state, dt, config, C)
        adv, stab = _cfl_bounds(
            mesh,
            state.rho,
            state.u,
            p,
            rho_face,
            new_state.phi,
            internals["rho_dual_new"],
            C,
            config.eta,
        )
        if dt <= min(adv, stab) * (1.0 + 1e-12):
            break
        halvings += 1
        if halvings > config.max_halvings:
            raise SchemeError(
                f"time-step verification failed after {config.max_halvings} halvings"
            )
        dt *= 0.5

    res = poisson_residual(mesh, new_state, internals["boundary"])
    scale = max(1.0, float(np.max(np.abs(new_state.rho - 1.0))))
    bound = 10.0 * config.solver.rtol * scale
    if res > bound:
        raise SchemeError(
            f"potential/density coupling drifted: residual {res:.3e} > {bound:.3e}"
        )

    dual_ratio = max(
        float(np.max(old[fs.interior] / new[fs.interior]))
        for fs, old, new in zip(mesh.faces, internals["rho_dual"],
                                internals["rho_dual_new"])
    )
    triple = energies(mesh, new_state)
    report = StepReport(
        dt=dt,
        active_bound=tag,
        halvings=halvings,
        solver_iterations=internals["solution"].iterations,
        solver_residual=internals["solution"].relative_residual,
        energy=triple,
        mass=total_mass(mesh, new_state.rho),
        max_density_deviation=float(np.max(np.abs(new_state.rho - 1.0))),
        entropy_ok=bool(triple.total <= e_old + 1e-10 * max(abs(e_old), 1e-300)),
        poisson_residual=res,
        max_dual_density_ratio=dual_ratio,
        eta_condition_ok=bool(dual_ratio <= config.eta),
    )
    return new_state, report


def cell_averages(mesh: Mesh, f) -> np.ndarray:
    """Cell averages of a closure f(x[, y]) by tensor 3-point Gauss quadrature."""
    if mesh.dim == 1:
        (edges,) = mesh.spec.axis_edges
        a, b = edges[:-1], edges[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        vals = np.zeros(mesh.n_cells)
        for node, w in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            vals += w * np.asarray(f(mid + node * half), dtype=float)
        return vals
    ex, ey = mesh.spec.axis_edges
    ax, bx = ex[:-1], ex[1:]
    ay, by = ey[:-1], ey[1:]
    midx, halfx = 0.5 * (ax + bx), 0.5 * (bx - ax)
    midy, halfy = 0.5 * (ay + by), 0.5 * (by - ay)
    vals = np.zeros(mesh.shape)
    for nx, wx in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
        for ny, wy in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            X = (midx + nx * halfx)[:, None]
            Y = (midy + ny * halfy)[None, :]
            vals += wx * wy * np.asarray(f(X, Y), dtype=float)
    return vals.ravel()


def _box_average(f, lo: np.ndarray, hi: np.ndarray, dim: int) -> np.ndarray:
    """Average of f over axis-aligned boxes given per-box corner arrays."""
    mids = [(0.5 * (lo[d] + hi[d]), 0.5 * (hi[d] - lo[d])) for d in range(dim)]
    acc = 0.0
    if dim == 1:
        for n, w in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            acc = acc + w * np.asarray(f(mids[0][0] + n * mids[0][1]), dtype=float)
        return acc
    for nx, wx in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
        for ny, wy in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            X = mids[0][0] + nx * mids[0][1]
            Y = mids[1][0] + ny * mids[1][1]
            acc = acc + wx * wy * np.asarray(f(X, Y), dtype=float)
    return acc


def dual_cell_averages(mesh: Mesh, direction: int, f) -> np.ndarray:
    """Dual-cell averages of a closure for the direction-i velocity component.

    Each dual cell is the union of the two half cells beside the face;
    both halves are integrated separately (3-point Gauss per axis) and
    volume-weighted.  Exterior faces get zero (no-flux trace).
    """
    fs = mesh.faces[direction]
    out = np.zeros(fs.n_faces)
    interior = np.flatnonzero(fs.interior)
    centers = fs.centers
    dim = mesh.dim

    for side, cells, half_vol in (
        ("left", fs.left_cell, fs.half_left),
        ("right", fs.right_cell, fs.half_right),
    ):
        cell = cells[interior]
        lo = np.empty((dim, interior.size))
        hi = np.empty((dim, interior.size))
        cidx = np.unravel_index(cell, mesh.shape)
        for d in range(dim):
            if d == direction:
                # half cell between the cell center and the face; periodic
                # wrap evaluates the (periodic) closure outside the domain
                face_x = centers[interior, d]
                width = mesh.cell_widths_axis[d][cidx[d]]
                if side == "left":
                    lo[d] = face_x - 0.5 * width
                    hi[d] = face_x
                else:
                    lo[d] = face_x
                    hi[d] = face_x + 0.5 * width
            else:
                e = mesh.spec.axis_edges[d]
                lo[d] = e[:-1][cidx[d]]
                hi[d] = e[1:][cidx[d]]
        out[interior] += half_vol[interior] * _box_average(f, lo, hi, dim)
    out[fs.interior] /= fs.dual_volume[fs.interior]
    return out


def init_state(
    mesh: Mesh,
    rho0,
    u0,
    eps: float,
    gamma: float,
    solver: SolverConfig | None = None,
    dirichlet_phi: list[np.ndarray] | None = None,
) -> State:
    """Discretise initial closures and solve the Poisson equation for phi^0."""
    rho = cell_averages(mesh, rho0)
    if np.any(rho <= 0.0):
        raise SchemeError("initial density is nonpositive after cell averaging")
    u = [dual_cell_averages(mesh, i, u0[i]) for i in range(mesh.dim)]

    rho_face = [
        thermo.interface_density(*face_states(mesh, rho, i), gamma)
        for i in range(mesh.dim)
    ]
    zeros = [np.zeros(fs.n_faces) for fs in mesh.faces]
    system = assemble_potential_system(
        mesh,
        rho,
        zeros,
        thermo.pressure(rho, gamma),
        rho_face,
        zeros,
        dt=0.0,
        eps=eps,
        dirichlet_phi=dirichlet_phi,
    )
    sol = solve(system, solver or SolverConfig())
    return State(rho=rho, u=u, phi=sol.phi, t=0.0, eps=eps, gamma=gamma)
