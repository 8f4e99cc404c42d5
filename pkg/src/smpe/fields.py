"""Uniform 1-D grids, hydrodynamic states, potentials and observables.

A state is the pair (rho, S): probability density and dimensionless phase,
psi = sqrt(rho) * exp(i S). All integrals use the trapezoidal rule on the
uniform grid, summed left to right so results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .params import ModelParams

MIN_POINTS = 16
# guard for (grad R)^2 = (grad rho)^2 / (4 rho) in the energy integrand
ENERGY_FLOOR_REL = 1e-30


class NonNormalizableError(ValueError):
    pass


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [x_min, x_max].

    Non-periodic grids include both endpoints, dx = (x_max - x_min)/(n - 1).
    Periodic grids identify x_max with x_min and omit it, dx = (x_max - x_min)/n.
    """

    x_min: float
    x_max: float
    n: int
    periodic: bool = False

    def __post_init__(self) -> None:
        if self.n < MIN_POINTS:
            raise ValueError(f"grid needs at least {MIN_POINTS} points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, dx: float,
                     periodic: bool = False) -> "Grid1D":
        """Grid whose spacing is exactly dx; x_max is moved outward if needed."""
        cells = math.ceil((x_max - x_min) / dx - 1e-9)
        n = cells if periodic else cells + 1
        return cls(x_min, x_min + cells * dx, n, periodic)

    @classmethod
    def centered(cls, center: float, half_width: float, dx: float) -> "Grid1D":
        """Non-periodic grid symmetric about center with spacing dx."""
        half_cells = math.ceil(half_width / dx - 1e-9)
        return cls(center - half_cells * dx, center + half_cells * dx, 2 * half_cells + 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / (self.n if self.periodic else self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def shifted(self, shift: float) -> "Grid1D":
        return Grid1D(self.x_min + shift, self.x_max + shift, self.n, self.periodic)


@dataclass(frozen=True)
class HydroState:
    t: float
    rho: np.ndarray
    S: np.ndarray
    non_normalizable: bool = False

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=float)
        S = np.asarray(self.S, dtype=float)
        if rho.shape != S.shape or rho.ndim != 1:
            raise ValueError("rho and S must be 1-D arrays of equal length")
        if np.any(rho < 0):
            raise ValueError("density must be non-negative")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "S", S)


# --- potentials --------------------------------------------------------------

@dataclass(frozen=True)
class ZeroPotential:
    static = True

    def __call__(self, x, t: float):
        return np.zeros_like(np.asarray(x, dtype=float))

    def gradient(self, x, t: float):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class HarmonicPotential:
    """V = k (x - center)**2."""

    k: float
    center: float = 0.0
    static = True

    def __call__(self, x, t: float):
        return self.k * (np.asarray(x, dtype=float) - self.center) ** 2

    def gradient(self, x, t: float):
        return 2.0 * self.k * (np.asarray(x, dtype=float) - self.center)


@dataclass(frozen=True)
class ComovingHarmonicPotential:
    """V = k (x - x_c - v t)**2."""

    k: float
    v: float
    x_c: float = 0.0
    static = False

    def __call__(self, x, t: float):
        return self.k * (np.asarray(x, dtype=float) - self.x_c - self.v * t) ** 2

    def gradient(self, x, t: float):
        return 2.0 * self.k * (np.asarray(x, dtype=float) - self.x_c - self.v * t)


@dataclass(frozen=True)
class TimeDependentHarmonicPotential:
    """V = A(t) x**2 with a caller-supplied strength A(t)."""

    amplitude: Callable[[float], float] = field(compare=False)
    static = False

    def __call__(self, x, t: float):
        return self.amplitude(t) * np.asarray(x, dtype=float) ** 2

    def gradient(self, x, t: float):
        return 2.0 * self.amplitude(t) * np.asarray(x, dtype=float)


# --- finite differences ------------------------------------------------------

def gradient(f, dx: float, periodic: bool = False) -> np.ndarray:
    """Second-order central difference; second-order one-sided at the edges."""
    f = np.asarray(f, dtype=float)
    if f.size < 3:
        raise ValueError("gradient needs at least 3 points")
    if periodic:
        return (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * dx)
    g = np.empty_like(f)
    g[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    g[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return g


def laplacian(f, dx: float, periodic: bool = False) -> np.ndarray:
    """3-point stencil inside; second-order one-sided 4-point stencil at the edges."""
    f = np.asarray(f, dtype=float)
    if f.size < 3:
        raise ValueError("laplacian needs at least 3 points")
    if periodic:
        return (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / dx**2
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dx**2
    if f.size == 3:
        out[0] = out[-1] = out[1]
    else:
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx**2
        out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / dx**2
    return out


def _wrapped_forward_differences(S: np.ndarray) -> np.ndarray:
    d = np.roll(S, -1) - S
    return (d + np.pi) % (2.0 * np.pi) - np.pi


def phase_gradient(S, dx: float, periodic: bool = False) -> np.ndarray:
    """Gradient of a phase field.

    On periodic grids only exp(iS) is single valued, so node-to-node
    differences are wrapped into [-pi, pi) before differencing.
    """
    if not periodic:
        return gradient(S, dx)
    d = _wrapped_forward_differences(np.asarray(S, dtype=float))
    return (d + np.roll(d, 1)) / (2.0 * dx)


def phase_laplacian(S, dx: float, periodic: bool = False) -> np.ndarray:
    if not periodic:
        return laplacian(S, dx)
    d = _wrapped_forward_differences(np.asarray(S, dtype=float))
    return (d - np.roll(d, 1)) / dx**2


def integrate(f, grid: Grid1D) -> float:
    f = np.asarray(f, dtype=float)
    if grid.periodic:
        return float(np.sum(f) * grid.dx)
    return float(np.trapezoid(f, dx=grid.dx))


# --- observables -------------------------------------------------------------

@dataclass(frozen=True)
class Observables:
    norm: float
    mean_x: float
    mean_p: float
    mean_p2: float
    width: float


def _grad_amplitude_sq(rho: np.ndarray, dx: float, periodic: bool) -> np.ndarray:
    eps = ENERGY_FLOOR_REL * float(rho.max()) if rho.size else 0.0
    return gradient(rho, dx, periodic) ** 2 / (4.0 * np.maximum(rho, eps))


def observables(state: HydroState, grid: Grid1D, p: ModelParams) -> Observables:
    if state.non_normalizable:
        raise NonNormalizableError("observables need a normalizable state")
    x, dx, per = grid.x, grid.dx, grid.periodic
    rho = state.rho
    dS = phase_gradient(state.S, dx, per)
    norm = integrate(rho, grid)
    mean_x = integrate(x * rho, grid)
    mean_x2 = integrate(x * x * rho, grid)
    mean_p = p.hbar * integrate(rho * dS, grid)
    mean_p2 = p.hbar**2 * integrate(_grad_amplitude_sq(rho, dx, per) + rho * dS**2, grid)
    width = math.sqrt(max(mean_x2 - mean_x**2, 0.0))
    return Observables(norm, mean_x, mean_p, mean_p2, width)


def energy_density(state: HydroState, grid: Grid1D, V, p: ModelParams) -> np.ndarray:
    dx, per = grid.dx, grid.periodic
    rho = state.rho
    dS = phase_gradient(state.S, dx, per)
    lapS = phase_laplacian(state.S, dx, per)
    kinetic = p.hbar**2 / (2.0 * p.m) * (_grad_amplitude_sq(rho, dx, per) + rho * dS**2)
    return kinetic + p.C * rho * lapS**2 + V(grid.x, state.t) * rho


def energy(state: HydroState, grid: Grid1D, V, p: ModelParams) -> float:
    """Quadrature of the energy functional at the state's time."""
    if state.non_normalizable:
        raise NonNormalizableError("energy needs a normalizable state")
    return integrate(energy_density(state, grid, V, p), grid)
