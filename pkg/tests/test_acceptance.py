"""Acceptance suite: one test per acceptance criterion, at fixed tolerances.

Each test prints one ``ACCEPTANCE PASS/FAIL [name]`` line (visible with
``pytest -s``) and asserts its runtime budget.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from macplasma import classical as cl
from macplasma import limit as lim
from macplasma import operators as ops
from macplasma import semi_implicit as si
from macplasma import thermo
from macplasma.cases import preset
from macplasma.diagnostics import energies, entropy_monitor, total_mass
from macplasma.elliptic import SolverConfig, assemble_potential_system, is_m_matrix, solve
from macplasma.mesh import NEUMANN, PERIODIC, GridSpec, build_mesh
from macplasma.operators import dual_average, face_states

SOLVER_RTOL = 1e-10


@contextmanager
def criterion(name: str, limit_s: float):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL [{name}]")
        raise
    elapsed = time.perf_counter() - t0
    assert elapsed < limit_s, f"{name}: runtime {elapsed:.1f}s exceeds {limit_s}s"
    print(f"ACCEPTANCE PASS [{name}] runtime {elapsed:.2f}s < {limit_s:.0f}s")


def march(mesh, state, t_end, config=None, collect=None):
    """Advance the semi-implicit scheme to t_end, applying a collector."""
    n = 0
    while t_end - state.t > 1e-13 * max(1.0, t_end):
        state, report = si.step(mesh, state, config, dt_limit=t_end - state.t)
        n += 1
        if collect is not None:
            collect(state, report)
    return state, n


def test_operator_duality():
    with criterion("operator-duality", 5.0):
        rng = np.random.default_rng(7)
        for cells, boundary in (([64], PERIODIC), ([64], NEUMANN),
                                ([32, 32], PERIODIC), ([32, 32], NEUMANN)):
            mesh = build_mesh(GridSpec.uniform(cells, boundary=boundary))
            for _ in range(100):
                q = rng.standard_normal(mesh.n_cells)
                v = []
                for fs in mesh.faces:
                    vi = rng.standard_normal(fs.n_faces)
                    vi[fs.exterior] = 0.0
                    v.append(vi)
                g = ops.grad_interior(mesh, q)
                lhs = float(np.sum(mesh.cell_volumes * q * ops.div(mesh, v)))
                rhs = 0.0
                scale = float(np.sum(mesh.cell_volumes * np.abs(q * ops.div(mesh, v))))
                for fs, gi, vi in zip(mesh.faces, g, v):
                    rhs += float(np.sum(fs.dual_volume * gi * vi))
                    scale += float(np.sum(fs.dual_volume * np.abs(gi * vi)))
                assert abs(lhs + rhs) <= 1e-12 * max(scale, 1e-30)


def test_interface_density():
    with criterion("interface-density", 1.0):
        rng = np.random.default_rng(11)
        for gamma in (1.0, 1.4, 5.0 / 3.0, 2.0):
            a = rng.uniform(0.1, 10.0, 10_000)
            b = rng.uniform(0.1, 10.0, 10_000)
            rs = thermo.interface_density(a, b, gamma)
            hi = np.maximum(a, b)
            lo = np.minimum(a, b)
            assert np.all(rs >= lo - 1e-12 * hi)
            assert np.all(rs <= hi * (1.0 + 1e-12))
            res = a**gamma - b**gamma - rs * (
                thermo.helmholtz_prime(a, gamma) - thermo.helmholtz_prime(b, gamma)
            )
            assert np.max(np.abs(res)) <= 1e-13 * np.max(hi) ** gamma
            if gamma == 2.0:
                assert np.max(np.abs(rs - 0.5 * (a + b))) <= 1e-14 * np.max(hi)


def test_m_matrix_structure():
    with criterion("m-matrix", 5.0):
        rng = np.random.default_rng(13)
        for eps in (1.0, 1e-4):
            for boundary in (PERIODIC, NEUMANN):
                mesh = build_mesh(GridSpec.uniform([16, 12], boundary=boundary))
                for _ in range(5):
                    rho = rng.uniform(0.5, 2.0, mesh.n_cells)
                    u = []
                    for fs in mesh.faces:
                        ui = rng.standard_normal(fs.n_faces)
                        ui[fs.exterior] = 0.0
                        u.append(ui)
                    rho_f = [
                        thermo.interface_density(*face_states(mesh, rho, i), 1.4)
                        for i in range(2)
                    ]
                    eta_f = [1.5 / rd for rd in dual_average(mesh, rho)]
                    system = assemble_potential_system(
                        mesh, rho, u, thermo.pressure(rho, 1.4), rho_f, eta_f,
                        dt=rng.uniform(1e-4, 1e-2), eps=eps,
                    )
                    assert is_m_matrix(system).is_m_matrix


def test_poisson_coupling_consistency():
    with criterion("poisson-coupling", 10.0):
        case = preset("qn1d")
        mesh = build_mesh(case.grid_spec())
        state = si.init_state(mesh, case.rho0, case.u0, case.eps, case.gamma)
        for _ in range(200):
            state, report = si.step(mesh, state)
            scale = max(1.0, float(np.max(np.abs(state.rho - 1.0))))
            assert report.poisson_residual <= 10.0 * SOLVER_RTOL * scale


def test_conservation():
    with criterion("conservation", 30.0):
        case = preset("qn1d")
        mesh = build_mesh(case.grid_spec())
        state = si.init_state(mesh, case.rho0, case.u0, case.eps, case.gamma)
        m0 = total_mass(mesh, state.rho)
        for _ in range(1000):
            state, report = si.step(mesh, state)
            assert abs(report.mass - m0) <= 1e-12 * m0

        col = cl.init_collocated(mesh, case.rho0, case.u0, case.eps, case.gamma)
        m0 = total_mass(mesh, col.rho)
        cfg = cl.ClassicalConfig(dt_eps_factor=0.5)
        for _ in range(500):
            col, report = cl.step_classical(mesh, col, cfg)
            assert abs(report.mass - m0) <= 1e-12 * m0


@pytest.fixture(scope="module")
def column2d_run():
    """Shared 50x50 plasma-column run: energies plus snapshots at 0, tp/2, tp."""
    case = preset("column2d", cells=50)
    mesh = build_mesh(case.grid_spec())
    t_p = case.params["plasma_period"]
    state = si.init_state(mesh, case.rho0, case.u0, case.eps, case.gamma)
    totals = [energies(mesh, state).total]
    snaps = {0.0: state.rho.copy()}
    for target in (0.5 * t_p, t_p):
        state, _ = march(mesh, state, target,
                         collect=lambda s, r: totals.append(r.energy.total))
        snaps[target] = state.rho.copy()
    return mesh, case, t_p, totals, snaps


def test_entropy_stability(column2d_run):
    with criterion("entropy-stability", 300.0):
        case = preset("qn1d")
        mesh = build_mesh(case.grid_spec())
        state = si.init_state(mesh, case.rho0, case.u0, case.eps, case.gamma)
        totals = [energies(mesh, state).total]
        march(mesh, state, 0.1, collect=lambda s, r: totals.append(r.energy.total))
        ok, first = entropy_monitor(totals, tol=1e-10)
        assert ok, f"qn1d energy grew at step {first}"

        mesh2, _, _, totals2, _ = column2d_run
        ok, first = entropy_monitor(totals2, tol=1e-10)
        assert ok, f"column2d energy grew at step {first}"


def test_ap_property_sweep():
    with criterion("ap-property", 120.0):
        selected = {}
        for eps in (1e-1, 1e-2, 1e-4, 1e-6):
            case = preset("qn1d", eps=eps, cells=100)
            mesh = build_mesh(case.grid_spec())
            state = si.init_state(mesh, case.rho0, case.u0, case.eps, case.gamma)
            dts = []
            state, _ = march(mesh, state, 0.1,
                             collect=lambda s, r: dts.append(r.dt))
            selected[eps] = max(dts)
            dev = float(np.max(np.abs(state.rho - 1.0)))
            assert dev <= 10.0 * eps**2, f"eps={eps}: |rho-1| = {dev}"
        dts = np.array(list(selected.values()))
        assert dts.max() / dts.min() < 2.0


def test_classical_stiffness_witness():
    with criterion("classical-stiffness", 60.0):
        case = preset("qn1d")
        mesh = build_mesh(case.grid_spec())

        # dt = 0.5 eps: stable to t = 0.01
        state = cl.init_collocated(mesh, case.rho0, case.u0, case.eps, case.gamma)
        cfg = cl.ClassicalConfig(dt_eps_factor=0.5)
        e0 = cl.energies_collocated(mesh, state).total
        while 0.01 - state.t > 1e-13:
            state, report = cl.step_classical(mesh, state, cfg, dt_limit=0.01 - state.t)
        assert np.all(np.isfinite(state.rho)) and np.all(state.rho > 0.0)
        assert report.energy.total <= e0 * (1.0 + 1e-6)

        # dt = 10 eps: the energy monitor reports growth within 500 steps
        state = cl.init_collocated(mesh, case.rho0, case.u0, case.eps, case.gamma)
        cfg = cl.ClassicalConfig(dt_eps_factor=10.0)
        totals = [cl.energies_collocated(mesh, state).total]
        for _ in range(500):
            try:
                state, report = cl.step_classical(mesh, state, cfg)
            except Exception:
                break  # blow-up is an even stronger witness
            totals.append(report.energy.total)
            ok, _ = entropy_monitor(totals, tol=1e-10)
            if not ok:
                break
        ok, first = entropy_monitor(totals, tol=1e-10)
        assert not ok and first is not None and first <= 500


def test_limit_consistency():
    with criterion("limit-consistency", 30.0):
        case = preset("qn2d", eps=1e-8, cells=32)
        mesh = build_mesh(case.grid_spec())
        ap_state = si.init_state(mesh, case.rho0, case.u0, case.eps, case.gamma)
        ap_new, ap_report = si.step(mesh, ap_state)

        lim_state = lim.init_limit(mesh, case.u0)
        cfg = lim.LimitConfig(gamma=case.gamma)
        lim_new, lim_report = lim.step_limit(mesh, lim_state, ap_report.dt, cfg)

        for a, b in zip(ap_new.u, lim_new.u):
            assert np.max(np.abs(a - b)) <= 1e-6

        h = 1.0 / 32
        u_inf = max(float(np.max(np.abs(ui))) for ui in lim_state.u)
        assert lim_report.divergence_constraint <= 10.0 * SOLVER_RTOL * u_inf / h


def test_plasma_column_periodicity(column2d_run):
    with criterion("column-periodicity", 300.0):
        mesh, case, t_p, _, snaps = column2d_run

        def l1(a):
            return float(np.sum(mesh.cell_volumes * np.abs(a)))

        d_half = l1(snaps[0.5 * t_p] - snaps[0.0])
        d_full = l1(snaps[t_p] - snaps[0.0])
        assert d_full < d_half, f"L1(tp)={d_full} not below L1(tp/2)={d_half}"

        def contact_index(rho):
            profile = rho.reshape(mesh.shape).mean(axis=1)
            return int(np.argmax(np.abs(np.diff(profile))))

        assert contact_index(snaps[t_p]) == contact_index(snaps[0.0])


def test_laplacian_and_poisson_convergence():
    with criterion("poisson-convergence", 10.0):
        lap_errs, solve_errs = [], []
        for n in (32, 64, 128):
            mesh = build_mesh(GridSpec.uniform([n], boundary=PERIODIC))
            x = mesh.cell_centers_axis[0]
            q = np.sin(2.0 * np.pi * x)
            lap = ops.laplacian(mesh, q)
            lap_errs.append(np.max(np.abs(lap + 4.0 * np.pi**2 * q)))

            rho = 1.0 + q
            rho_f = [thermo.interface_density(*face_states(mesh, rho, 0), 2.0)]
            zeros = [np.zeros(mesh.faces[0].n_faces)]
            system = assemble_potential_system(
                mesh, rho, zeros, thermo.pressure(rho, 2.0), rho_f, zeros,
                dt=0.0, eps=1.0,
            )
            phi = solve(system, SolverConfig(rtol=1e-12)).phi
            solve_errs.append(np.max(np.abs(phi + q / (4.0 * np.pi**2))))
        for errs in (lap_errs, solve_errs):
            slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
            assert np.all(slopes >= 1.9), f"slopes {slopes}"
