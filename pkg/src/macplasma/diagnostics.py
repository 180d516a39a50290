"""Energy functionals, conservation and quasineutrality monitors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators, thermo
from .mesh import Mesh


@dataclass(frozen=True)
class EnergyTriple:
    """Internal, kinetic and electrostatic energy of one state."""

    internal: float
    kinetic: float
    potential: float

    @property
    def total(self) -> float:
        return self.internal + self.kinetic + self.potential


def energies(mesh: Mesh, state) -> EnergyTriple:
    """Discrete energies of a staggered state.

    internal  = sum_K |K| Pi_gamma(rho_K)
    kinetic   = 1/2 sum_sigma |D_sigma| rho_{D_sigma} u_sigma^2 (interior faces)
    potential = eps^2/2 sum_sigma |D_sigma| (grad phi)_sigma^2
    """
    internal = float(
        np.sum(mesh.cell_volumes * thermo.relative_internal_energy(state.rho, state.gamma))
    )
    rho_dual = operators.dual_average(mesh, state.rho)
    g_phi = operators.grad_interior(mesh, state.phi)
    kinetic = 0.0
    potential = 0.0
    for i, fs in enumerate(mesh.faces):
        interior = fs.interior
        kinetic += 0.5 * float(
            np.sum(fs.dual_volume[interior] * rho_dual[i][interior] * state.u[i][interior] ** 2)
        )
        potential += 0.5 * state.eps**2 * float(np.sum(fs.dual_volume * g_phi[i] ** 2))
    return EnergyTriple(internal=internal, kinetic=kinetic, potential=potential)


def total_mass(mesh: Mesh, rho: np.ndarray) -> float:
    return float(np.sum(mesh.cell_volumes * rho))


def quasineutrality_deviation(mesh: Mesh, state) -> tuple[float, float]:
    """(max |rho - 1|, max |div u|) of a staggered state."""
    dev = float(np.max(np.abs(state.rho - 1.0)))
    div_u = operators.div(mesh, state.u)
    return dev, float(np.max(np.abs(div_u)))


def velocity_l2(mesh: Mesh, u: list[np.ndarray]) -> float:
    """Dual-cell weighted L2 norm of a face velocity field."""
    acc = 0.0
    for i, fs in enumerate(mesh.faces):
        interior = fs.interior
        acc += float(np.sum(fs.dual_volume[interior] * u[i][interior] ** 2))
    return float(np.sqrt(acc))


def well_prepared_measure(mesh: Mesh, rho0: np.ndarray, u0: list[np.ndarray],
                          eps: float) -> float:
    """||u0||_L2 + ||rho0 - 1||_inf / eps^2; bounded uniformly in eps for
    well-prepared data."""
    return velocity_l2(mesh, u0) + float(np.max(np.abs(rho0 - 1.0))) / eps**2


def entropy_monitor(totals, tol: float = 1e-10) -> tuple[bool, int | None]:
    """Check E^{n+1} <= E^n + tol*E^0 along a total-energy sequence.

    Returns (ok, index of the first violating step or None).
    """
    totals = np.asarray(totals, dtype=float)
    if totals.size < 2:
        return True, None
    allowed = tol * totals[0]
    growth = np.diff(totals)
    bad = np.flatnonzero(growth > allowed)
    if bad.size:
        return False, int(bad[0]) + 1
    return True, None
