"""Time-loop orchestration: drive one scheme over a case and write artifacts.

A run marches from t = 0 through the requested output times (time steps are
capped so every output time is hit exactly), writing one snapshot CSV per
output time, a step-report CSV stream and a JSON manifest with a config echo
and pass/fail summary of the runtime invariants.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classical as cl
from . import limit as lim
from . import semi_implicit as si
from .cases import CasePreset
from .diagnostics import energies, entropy_monitor, quasineutrality_deviation, total_mass
from .elliptic import SolverConfig, assemble_potential_system, dump_matrix
from .mesh import Mesh, build_mesh
from .operators import dual_average, face_states
from .snapshots import report_row, write_manifest, write_report_stream, write_snapshot
from .thermo import interface_density, pressure

SCHEMES = ("ap", "classical", "limit")

_MAX_STEPS = 2_000_000
_TIME_ATOL = 1e-12


@dataclass
class RunResult:
    out_dir: Path
    n_steps: int
    dts: np.ndarray
    energy_totals: np.ndarray
    entropy_monotone: bool
    mass_drift: float
    final_max_density_deviation: float
    wall_time_s: float
    snapshots: list[Path]


def _resolve_targets(output_times, t_end: float | None) -> list[float]:
    # the initial state is always snapshotted
    times = sorted({0.0} | {float(t) for t in output_times})
    if t_end is not None:
        times = [t for t in times if t < t_end - _TIME_ATOL] + [float(t_end)]
    if not times:
        raise ValueError("no output times requested")
    return times


def run_case(
    case: CasePreset,
    scheme: str,
    out_dir,
    ap_config: si.APConfig | None = None,
    classical_config: cl.ClassicalConfig | None = None,
    limit_config: lim.LimitConfig | None = None,
    t_end: float | None = None,
    dump_matrix_path=None,
    config_echo: dict | None = None,
) -> RunResult:
    """Run one scheme over one case, writing snapshots, reports and manifest."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mesh = build_mesh(case.grid_spec())
    targets = _resolve_targets(case.output_times, t_end)

    started = time.perf_counter()
    ap_config = ap_config or si.APConfig()
    classical_config = classical_config or cl.ClassicalConfig()
    limit_config = limit_config or lim.LimitConfig(gamma=case.gamma)

    if scheme == "ap":
        state = si.init_state(mesh, case.rho0, case.u0, case.eps, case.gamma,
                              solver=ap_config.solver)
        stepper = lambda s, lim_dt: si.step(mesh, s, ap_config, dt_limit=lim_dt)
        e0 = energies(mesh, state).total
        m0 = total_mass(mesh, state.rho)
    elif scheme == "classical":
        state = cl.init_collocated(mesh, case.rho0, case.u0, case.eps, case.gamma,
                                   solver=classical_config.solver)
        stepper = lambda s, lim_dt: cl.step_classical(mesh, s, classical_config,
                                                      dt_limit=lim_dt)
        e0 = cl.energies_collocated(mesh, state).total
        m0 = total_mass(mesh, state.rho)
    else:
        state = lim.init_limit(mesh, case.u0)

        def stepper(s, lim_dt):
            dt = min(lim.compute_dt_limit(mesh, s, limit_config), lim_dt)
            return lim.step_limit(mesh, s, dt, limit_config)

        e0 = 0.5 * sum(
            float(np.sum(fs.dual_volume[fs.interior] * ui[fs.interior] ** 2))
            for fs, ui in zip(mesh.faces, state.u)
        )
        m0 = mesh.domain_volume

    if dump_matrix_path is not None:
        _dump_initial_matrix(mesh, case, scheme, ap_config, dump_matrix_path)

    rows: list[dict] = []
    totals = [e0]
    snapshots: list[Path] = []
    error: dict | None = None
    n_steps = 0
    snap_idx = 0

    def emit_snapshot(s):
        nonlocal snap_idx
        path = out_dir / f"snapshot_{snap_idx:03d}.csv"
        write_snapshot(path, mesh, s)
        snapshots.append(path)
        snap_idx += 1

    failure: Exception | None = None
    try:
        for target in targets:
            if target <= _TIME_ATOL:
                emit_snapshot(state)
                continue
            while target - state.t > _TIME_ATOL * max(1.0, target):
                state, report = stepper(state, target - state.t)
                n_steps += 1
                rows.append(report_row(n_steps, state.t, report))
                totals.append(report.energy.total)
                if n_steps >= _MAX_STEPS:
                    raise si.SchemeError(f"step budget exceeded ({_MAX_STEPS})")
            emit_snapshot(state)
    except Exception as exc:  # record in the manifest, then re-raise
        failure = exc
        error = {"type": type(exc).__name__, "message": str(exc), "at_step": n_steps}

    wall = time.perf_counter() - started
    monotone, first_bad = entropy_monitor(totals)
    dts = np.array([r["dt"] for r in rows], dtype=float)
    if scheme == "limit":
        mass_drift = 0.0
        final_dev = 0.0
    else:
        mass_drift = abs(total_mass(mesh, state.rho) - m0) / max(abs(m0), 1e-300)
        final_dev = float(np.max(np.abs(state.rho - 1.0)))

    write_report_stream(out_dir / "steps.csv", rows)
    residuals = [r["poisson_residual"] for r in rows if r["poisson_residual"] != ""]
    summary = {
        "scheme": scheme,
        "final_time": state.t,
        "n_steps": n_steps,
        "energy_initial": totals[0],
        "energy_final": totals[-1],
        "entropy_monotone": monotone,
        "entropy_first_violation": first_bad,
        "mass_drift_relative": mass_drift,
        "final_max_density_deviation": final_dev,
        "max_poisson_residual": max(residuals) if residuals else None,
        "dt_min": float(dts.min()) if dts.size else None,
        "dt_max": float(dts.max()) if dts.size else None,
        "wall_time_s": wall,
    }
    write_manifest(
        out_dir / "manifest.json",
        config_echo if config_echo is not None else case.to_config(),
        mesh,
        summary,
        error=error,
    )
    if failure is not None:
        raise RunFailure(error["message"], out_dir) from failure

    return RunResult(
        out_dir=out_dir,
        n_steps=n_steps,
        dts=dts,
        energy_totals=np.asarray(totals),
        entropy_monotone=monotone,
        mass_drift=mass_drift,
        final_max_density_deviation=final_dev,
        wall_time_s=wall,
        snapshots=snapshots,
    )


class RunFailure(RuntimeError):
    """A run aborted; the manifest carries the structured error record."""

    def __init__(self, message: str, out_dir: Path):
        super().__init__(message)
        self.out_dir = out_dir


def _dump_initial_matrix(mesh: Mesh, case: CasePreset, scheme: str,
                         ap_config: si.APConfig, path) -> None:
    """Dump the first assembled elliptic matrix in coordinate text format."""
    rho = si.cell_averages(mesh, case.rho0)
    if scheme == "ap":
        u = [si.dual_cell_averages(mesh, i, case.u0[i]) for i in range(mesh.dim)]
        eta_f = si.eta_faces(dual_average(mesh, rho), ap_config.eta)
        C = si.compute_C(rho, case.gamma, ap_config.c_margin)
        state = si.State(rho=rho, u=u, phi=np.zeros(mesh.n_cells), t=0.0,
                         eps=case.eps, gamma=case.gamma)
        dt, _ = si.compute_dt(mesh, state, state.phi, C, ap_config.eta,
                              ap_config.cfl_safety, cap=ap_config.max_dt)
    else:
        u = [np.zeros(fs.n_faces) for fs in mesh.faces]
        eta_f = [np.zeros(fs.n_faces) for fs in mesh.faces]
        dt = 0.0
    rho_face = [
        interface_density(*face_states(mesh, rho, i), case.gamma)
        for i in range(mesh.dim)
    ]
    system = assemble_potential_system(
        mesh, rho, u, pressure(rho, case.gamma), rho_face, eta_f, dt, case.eps
    )
    dump_matrix(system, path)
