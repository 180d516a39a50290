import numpy as np
import pytest

from macplasma.classical import (
    ClassicalConfig,
    CollocatedState,
    cell_gradient,
    init_collocated,
    rusanov_flux,
    select_dt,
    step_classical,
    wave_speed,
)
from macplasma.mesh import NEUMANN, PERIODIC, GridSpec, build_mesh
from macplasma.semi_implicit import SchemeError


def test_rusanov_equal_states_no_diffusion():
    F = rusanov_flux(1.3, 0.7, 1.3, 0.7, gamma=1.4)
    assert F == pytest.approx(1.3 * 0.7)


def test_rusanov_pure_diffusion_at_rest():
    gamma = 2.0
    rho_l, rho_r = 1.0, 4.0
    s = max(np.sqrt(gamma * rho_l ** (gamma - 1)), np.sqrt(gamma * rho_r ** (gamma - 1)))
    F = rusanov_flux(rho_l, 0.0, rho_r, 0.0, gamma)
    assert F == pytest.approx(-0.5 * s * (rho_r - rho_l))


def test_rusanov_swap_symmetry():
    gamma = 1.4
    a, ua, b, ub = 1.0, 0.4, 2.0, -0.1
    F_ab = rusanov_flux(a, ua, b, ub, gamma)
    F_ba = rusanov_flux(b, ub, a, ua, gamma)
    avg = 0.5 * (a * ua + b * ub)
    # average part preserved, diffusion part negated
    assert F_ab + F_ba == pytest.approx(2.0 * avg)


def test_wave_speed_formula_and_flag():
    # combined form |u + c| as written; split form |u| + c behind the flag
    assert wave_speed(np.array([1.0]), np.array([-3.0]), 2.0, combined=True)[0] == (
        pytest.approx(abs(-3.0 + np.sqrt(2.0)))
    )
    assert wave_speed(np.array([1.0]), np.array([-3.0]), 2.0, combined=False)[0] == (
        pytest.approx(3.0 + np.sqrt(2.0))
    )


def test_select_dt_rule():
    mesh = build_mesh(GridSpec.uniform([100], boundary=PERIODIC))
    state = CollocatedState(
        rho=np.ones(100), u=[np.zeros(100)], phi=np.zeros(100),
        t=0.0, eps=1e-4, gamma=2.0,
    )
    config = ClassicalConfig(cfl_advective=0.9, dt_eps_factor=0.5)
    dt = select_dt(mesh, state, config)
    assert dt == pytest.approx(min(0.9 * 0.01 / np.sqrt(2.0), 0.5e-4))


def test_rest_state_fixed_point():
    mesh = build_mesh(GridSpec.uniform([12, 12], boundary=PERIODIC))
    state = CollocatedState(
        rho=np.ones(mesh.n_cells),
        u=[np.zeros(mesh.n_cells), np.zeros(mesh.n_cells)],
        phi=np.zeros(mesh.n_cells),
        t=0.0, eps=1e-3, gamma=1.4,
    )
    new, report = step_classical(mesh, state)
    assert np.array_equal(new.rho, state.rho)
    assert all(np.allclose(a, 0.0) for a in new.u)
    assert np.allclose(new.phi, 0.0)
    assert report.mass == pytest.approx(1.0)


def test_mass_conservation_periodic():
    mesh = build_mesh(GridSpec.uniform([64], boundary=PERIODIC))
    x = mesh.cell_centers_axis[0]
    state = init_collocated(
        mesh,
        lambda x: 1.0 + 0.05 * np.sin(2.0 * np.pi * x),
        (lambda x: 0.1 * np.cos(2.0 * np.pi * x),),
        eps=0.5,
        gamma=2.0,
    )
    m0 = np.sum(mesh.cell_volumes * state.rho)
    for _ in range(50):
        state, report = step_classical(mesh, state)
        assert abs(report.mass - m0) <= 1e-12 * m0


def test_cell_gradient_exact_for_affine_interior():
    mesh = build_mesh(GridSpec.uniform([10, 8], boundary=NEUMANN))
    coords = mesh.cell_center_coords()
    q = 2.0 * coords[:, 0] - 3.0 * coords[:, 1] + 0.5
    gx, gy = cell_gradient(mesh, q)
    # interior cells see the exact affine slope; boundary cells use mirrors
    interior = np.ones(mesh.n_cells, dtype=bool)
    ix, iy = np.unravel_index(np.arange(mesh.n_cells), mesh.shape)
    interior &= (ix > 0) & (ix < mesh.shape[0] - 1)
    interior &= (iy > 0) & (iy < mesh.shape[1] - 1)
    assert np.allclose(gx[interior], 2.0)
    assert np.allclose(gy[interior], -3.0)


def test_positivity_abort():
    mesh = build_mesh(GridSpec.uniform([8], boundary=PERIODIC))
    x = mesh.cell_centers_axis[0]
    state = CollocatedState(
        rho=np.full(8, 1e-6),
        u=[10.0 * np.sin(2.0 * np.pi * x)],
        phi=np.zeros(8),
        t=0.0, eps=1.0, gamma=2.0,
    )
    with pytest.raises(SchemeError):
        step_classical(mesh, state, ClassicalConfig(dt_eps_factor=1e6, cfl_advective=50.0))
