"""Barotropic closures: pressure, Helmholtz energy and interface densities.

The gas law is p(rho) = rho**gamma with gamma >= 1.  The Helmholtz energy
density is rho*log(rho) for gamma = 1 and rho**gamma/(gamma-1) otherwise;
its second derivative is gamma*rho**(gamma-2) in both branches.
"""

from __future__ import annotations

import numpy as np

# relative rho_K ~ rho_L gap below which the two-state interface formula
# would cancel catastrophically; fall back to the equal-state branch
_EQUAL_STATE_RTOL = 1e-12


class NonPositiveDensityError(ValueError):
    """Raised when a thermodynamic closure receives rho <= 0."""


def _check_positive(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
        raise NonPositiveDensityError("density must be positive and finite")
    return rho


def pressure(rho, gamma: float):
    """p(rho) = rho**gamma."""
    rho = _check_positive(rho)
    return rho**gamma


def sound_speed(rho, gamma: float):
    """sqrt(p'(rho)) = sqrt(gamma * rho**(gamma-1))."""
    rho = _check_positive(rho)
    return np.sqrt(gamma * rho ** (gamma - 1.0))


def helmholtz(rho, gamma: float):
    """Helmholtz energy density psi(rho)."""
    rho = _check_positive(rho)
    if gamma == 1.0:
        return rho * np.log(rho)
    return rho**gamma / (gamma - 1.0)


def helmholtz_prime(rho, gamma: float):
    """psi'(rho)."""
    rho = _check_positive(rho)
    if gamma == 1.0:
        return np.log(rho) + 1.0
    return gamma * rho ** (gamma - 1.0) / (gamma - 1.0)


def helmholtz_second(rho, gamma: float):
    """psi''(rho) = gamma * rho**(gamma-2)."""
    rho = _check_positive(rho)
    return gamma * rho ** (gamma - 2.0)


def relative_internal_energy(rho, gamma: float):
    """Pi(rho) = psi(rho) - psi(1) - psi'(1)(rho - 1), nonnegative, zero at rho = 1.

    Evaluated through expm1/log1p so the cancellation near rho = 1 stays
    benign and the result does not dip below zero at roundoff level.
    """
    rho = _check_positive(rho)
    e = rho - 1.0
    if gamma == 1.0:
        # rho*log(rho) - (rho - 1)
        return rho * np.log1p(e) - e
    return (np.expm1(gamma * np.log1p(e)) - gamma * e) / (gamma - 1.0)


def interface_density(rho_a, rho_b, gamma: float):
    """Interface density rho_sigma of two states.

    Solves p(rho_a) - p(rho_b) = rho_sigma * (psi'(rho_a) - psi'(rho_b)),
    which has the closed forms

        gamma = 1:  logarithmic mean (rho_a - rho_b) / (log rho_a - log rho_b)
        gamma > 1:  (gamma-1)(rho_a^g - rho_b^g) / (gamma (rho_a^{g-1} - rho_b^{g-1}))

    and reduces to the common value for equal states.  The result always lies
    between the two inputs.
    """
    rho_a = _check_positive(rho_a)
    rho_b = _check_positive(rho_b)
    rho_a, rho_b = np.broadcast_arrays(rho_a, rho_b)
    if gamma == 2.0:
        # the two-state formula reduces exactly to the arithmetic mean, which
        # is also free of the near-equal cancellation of the general form
        out = 0.5 * (rho_a + rho_b)
        return float(out) if out.ndim == 0 else out
    near = np.abs(rho_a - rho_b) <= _EQUAL_STATE_RTOL * np.maximum(rho_a, rho_b)
    a = np.where(near, 1.0, rho_a)
    b = np.where(near, 2.0, rho_b)  # placeholder distinct values, masked out below
    if gamma == 1.0:
        mean = (a - b) / (np.log(a) - np.log(b))
    else:
        mean = ((gamma - 1.0) / gamma) * (a**gamma - b**gamma) / (
            a ** (gamma - 1.0) - b ** (gamma - 1.0)
        )
    out = np.where(near, rho_a, mean)
    if out.ndim == 0:
        return float(out)
    return out
