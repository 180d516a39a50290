"""Named experiment presets: initial data, boundary conditions, parameters.

Four configurations are provided:

* ``qn1d``      -- 1D periodic velocity perturbation of a quasineutral state;
* ``maxwell1d`` -- 1D periodic density perturbation of a static equilibrium;
* ``column2d``  -- oscillating plasma column in a walled box;
* ``qn2d``      -- 2D periodic velocity perturbation of a quasineutral state.

Grid size, Debye length, perturbation amplitude and output times can be
overridden; everything else is fixed by the preset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .mesh import NEUMANN, PERIODIC, GridSpec

CASE_NAMES = ("qn1d", "maxwell1d", "column2d", "qn2d")


@dataclass(frozen=True)
class CasePreset:
    """A fully resolved experiment: closures plus run parameters."""

    name: str
    dim: int
    cells: tuple[int, ...]
    boundary: str                  # "periodic" or "neumann" on all sides
    gamma: float
    eps: float
    delta: float
    rho0: Callable
    u0: tuple[Callable, ...]
    phi0: Callable | None
    output_times: tuple[float, ...]
    scheme: str = "ap"
    params: dict = field(default_factory=dict)

    def grid_spec(self) -> GridSpec:
        return GridSpec.uniform(self.cells, boundary=self.boundary)

    def to_config(self) -> dict:
        """JSON-serialisable description (closures are recreated by name)."""
        return {
            "case": self.name,
            "cells": list(self.cells),
            "eps": self.eps,
            "delta": self.delta,
            "gamma": self.gamma,
            "scheme": self.scheme,
            "output_times": list(self.output_times),
            **self.params,
        }


def _qn1d(eps: float, cells: int, delta: float | None,
          output_times: Sequence[float] | None) -> CasePreset:
    kappa = 16.0
    d = eps**2 if delta is None else delta
    return CasePreset(
        name="qn1d",
        dim=1,
        cells=(cells,),
        boundary=PERIODIC,
        gamma=2.0,
        eps=eps,
        delta=d,
        rho0=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        u0=(lambda x: 1.0 + d * np.cos(kappa * np.pi * x),),
        phi0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        output_times=tuple(output_times) if output_times is not None else (0.01, 0.1),
        params={"kappa": kappa},
    )


def _maxwell1d(eps: float, cells: int, delta: float | None,
               output_times: Sequence[float] | None,
               delta_mode: str = "eps2", kappa: float = 2220.0) -> CasePreset:
    # delta = eps gives non-well-prepared data, delta = eps^2 well-prepared
    if delta is None:
        d = eps if delta_mode == "eps" else eps**2
    else:
        d = delta
    return CasePreset(
        name="maxwell1d",
        dim=1,
        cells=(cells,),
        boundary=PERIODIC,
        gamma=5.0 / 3.0,
        eps=eps,
        delta=d,
        rho0=lambda x: 1.0 + d * np.sin(kappa * np.pi * x),
        u0=(lambda x: np.zeros_like(np.asarray(x, dtype=float)),),
        phi0=None,
        output_times=tuple(output_times) if output_times is not None else (0.1,),
        params={"kappa": kappa, "delta_mode": delta_mode},
    )


def _column2d(eps: float, cells: int, delta: float | None,
              output_times: Sequence[float] | None) -> CasePreset:
    d = eps if delta is None else delta
    t_p = 2.0 * math.pi * eps  # plasma period

    def rho0(x, y):
        x, _ = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.where(x < 0.5, 1.0 - d, 1.0 + d)

    def zero(x, y):
        return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
    return CasePreset(
        name="column2d",
        dim=2,
        cells=(cells, cells),
        boundary=NEUMANN,
        gamma=1.4,
        eps=eps,
        delta=d,
        rho0=rho0,
        u0=(zero, zero),
        phi0=None,
        output_times=tuple(output_times)
        if output_times is not None
        else (0.0, 0.5 * t_p, t_p),
        params={"plasma_period": t_p},
    )


def _qn2d(eps: float, cells: int, delta: float | None,
          output_times: Sequence[float] | None) -> CasePreset:
    kappa = 16.0
    d = eps**2 if delta is None else delta
    if output_times is None:
        output_times = (0.5, 2.0) if eps >= 1e-2 else (0.005,)

    def u0(x, y):
        return 1.0 + d * np.sin(kappa * np.pi * (np.asarray(x) + np.asarray(y)))

    def v0(x, y):
        return 1.0 + d * np.cos(kappa * np.pi * (np.asarray(x) + np.asarray(y)))

    def one(x, y):
        return np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape)

    return CasePreset(
        name="qn2d",
        dim=2,
        cells=(cells, cells),
        boundary=PERIODIC,
        gamma=2.0,
        eps=eps,
        delta=d,
        rho0=one,
        u0=(u0, v0),
        phi0=lambda x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape),
        output_times=tuple(output_times),
        params={"kappa": kappa},
    )


_DEFAULT_EPS = {"qn1d": 1e-4, "maxwell1d": 1e-4, "column2d": 1e-3, "qn2d": 1e-2}
_DEFAULT_CELLS = {"qn1d": 100, "maxwell1d": 100, "column2d": 100, "qn2d": 100}


def preset(
    name: str,
    eps: float | None = None,
    cells: int | None = None,
    delta: float | None = None,
    output_times: Sequence[float] | None = None,
    **kwargs,
) -> CasePreset:
    """Resolve a named preset, optionally overriding its parameters."""
    if name not in CASE_NAMES:
        raise ValueError(f"unknown case {name!r}; choose from {CASE_NAMES}")
    eps = _DEFAULT_EPS[name] if eps is None else float(eps)
    cells = _DEFAULT_CELLS[name] if cells is None else int(cells)
    builder = {
        "qn1d": _qn1d,
        "maxwell1d": _maxwell1d,
        "column2d": _column2d,
        "qn2d": _qn2d,
    }[name]
    return builder(eps, cells, delta, output_times, **kwargs)
