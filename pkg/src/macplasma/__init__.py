"""Finite-volume solvers for the one-fluid Euler-Poisson system on MAC grids.

The package provides three schemes sharing one staggered-mesh toolbox:

* :mod:`macplasma.semi_implicit` -- the energy-stable, asymptotic-preserving
  semi-implicit scheme (time step uniform in the Debye length);
* :mod:`macplasma.classical` -- an explicit collocated reference scheme with
  Rusanov fluxes, stable only for dt = O(eps);
* :mod:`macplasma.limit` -- the formal eps -> 0 limit scheme, a projection
  method for the stabilised incompressible Euler system.

Runtime diagnostics (discrete energy balance, mass conservation, Poisson
residual, quasineutrality) live in :mod:`macplasma.diagnostics`; the paper
experiments are packaged as presets in :mod:`macplasma.cases` and driven by
the command line interface in :mod:`macplasma.cli`.
"""

from .mesh import DIRICHLET, NEUMANN, PERIODIC, GridSpec, Mesh, build_mesh
from .semi_implicit import APConfig, State, StepReport, init_state, step

__all__ = [
    "APConfig",
    "DIRICHLET",
    "GridSpec",
    "Mesh",
    "NEUMANN",
    "PERIODIC",
    "State",
    "StepReport",
    "build_mesh",
    "init_state",
    "step",
]

__version__ = "0.1.0"
