import numpy as np
import pytest

from macplasma import thermo
from macplasma.thermo import NonPositiveDensityError

GAMMAS = [1.0, 1.4, 5.0 / 3.0, 2.0]


def test_pressure_values():
    assert thermo.pressure(1.0, 1.4) == pytest.approx(1.0)
    assert thermo.pressure(2.0, 2.0) == pytest.approx(4.0)
    assert thermo.pressure(0.5, 5.0 / 3.0) == pytest.approx(0.5 ** (5.0 / 3.0))


def test_pressure_rejects_nonpositive():
    with pytest.raises(NonPositiveDensityError):
        thermo.pressure(np.array([1.0, -0.5]), 2.0)
    with pytest.raises(NonPositiveDensityError):
        thermo.pressure(0.0, 1.0)


def test_helmholtz_values():
    assert thermo.helmholtz(1.0, 1.0) == pytest.approx(0.0)
    assert thermo.helmholtz(1.0, 2.0) == pytest.approx(1.0)
    assert thermo.helmholtz(np.e, 1.0) == pytest.approx(np.e)
    assert thermo.helmholtz_prime(1.0, 1.0) == pytest.approx(1.0)
    assert thermo.helmholtz_prime(1.0, 2.0) == pytest.approx(2.0)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_helmholtz_second_derivative(gamma):
    # finite-difference oracle for psi''
    rho = np.linspace(0.3, 3.0, 11)
    h = 1e-5
    fd = (
        thermo.helmholtz(rho + h, gamma)
        - 2.0 * thermo.helmholtz(rho, gamma)
        + thermo.helmholtz(rho - h, gamma)
    ) / h**2
    # central-difference oracle is itself only ~1e-5 accurate at this h
    assert np.allclose(thermo.helmholtz_second(rho, gamma), fd, rtol=1e-4)


def test_relative_internal_energy_values():
    assert thermo.relative_internal_energy(1.0, 1.7) == pytest.approx(0.0, abs=1e-15)
    # (rho^g - 1 - g(rho-1))/(g-1) at rho=2, g=2
    assert thermo.relative_internal_energy(2.0, 2.0) == pytest.approx(1.0)
    assert thermo.relative_internal_energy(2.0, 1.0) == pytest.approx(2.0 * np.log(2.0) - 1.0)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_relative_internal_energy_nonnegative(gamma, rng):
    rho = rng.uniform(0.05, 5.0, size=4000)
    pi = thermo.relative_internal_energy(rho, gamma)
    assert np.all(pi >= 0.0)
    # zero only at rho = 1, including values straddling 1 at roundoff scale
    near_one = 1.0 + rng.uniform(-1e-9, 1e-9, size=1000)
    pi = thermo.relative_internal_energy(near_one, gamma)
    assert np.all(pi >= 0.0)
    assert np.all(pi[np.abs(near_one - 1.0) > 1e-12] > 0.0)
    assert thermo.relative_internal_energy(np.ones(3), gamma) == pytest.approx(0.0)


def test_interface_density_examples():
    assert thermo.interface_density(2.0, 2.0, 1.4) == pytest.approx(2.0)
    # gamma = 2 closed form reduces to the arithmetic mean
    assert thermo.interface_density(1.0, 3.0, 2.0) == pytest.approx(2.0, abs=1e-14)
    # gamma = 1 is the logarithmic mean
    assert thermo.interface_density(1.0, np.e, 1.0) == pytest.approx(np.e - 1.0, rel=1e-14)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_interface_density_residual_and_containment(gamma, rng):
    a = rng.uniform(0.1, 10.0, size=10_000)
    b = rng.uniform(0.1, 10.0, size=10_000)
    rs = thermo.interface_density(a, b, gamma)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    assert np.all(rs >= lo - 1e-12 * hi)
    assert np.all(rs <= hi + 1e-12 * hi)
    residual = a**gamma - b**gamma - rs * (
        thermo.helmholtz_prime(a, gamma) - thermo.helmholtz_prime(b, gamma)
    )
    scale = np.max(np.maximum(a, b)) ** gamma
    assert np.max(np.abs(residual)) <= 1e-13 * scale


def test_interface_density_near_equal_states():
    # the guarded branch avoids log-mean cancellation
    a = np.array([1.0, 2.0, 0.5])
    b = a * (1.0 + 1e-14)
    for gamma in GAMMAS:
        rs = thermo.interface_density(a, b, gamma)
        assert np.allclose(rs, a, rtol=1e-13)


def test_sound_speed():
    assert thermo.sound_speed(1.0, 2.0) == pytest.approx(np.sqrt(2.0))
    assert thermo.sound_speed(4.0, 1.0) == pytest.approx(1.0)
