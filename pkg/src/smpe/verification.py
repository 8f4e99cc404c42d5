"""Residual certification, convergence orders and Ehrenfest balances.

Residuals of the two equations of motion are evaluated on samples of an
analytic family: time derivatives by central differences of step dt_fd,
space derivatives by the stencils in :mod:`smpe.fields`. The amplitude
equation is checked divided by 2R,

    hbar dS/dt = (hbar^2/2m) lap(R)/R - V - (hbar^2/2m) (grad S)^2 - C (lap S)^2,

so Gaussian tails cannot hide phase errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import AnalyticFamily
from .fields import (
    Grid1D,
    NonNormalizableError,
    gradient,
    integrate,
    laplacian,
    phase_gradient,
    phase_laplacian,
)
from .params import ModelParams

DT_FD = 1e-6
EDGE_FRACTION = 0.05
RESIDUAL_FLOOR_REL = 1e-12
NOISE_FLOOR = 1e-10


@dataclass(frozen=True)
class ResidualReport:
    res3_max: float
    res3_l2: float
    res4_max: float
    res4_l2: float
    dx: float
    dt_fd: float
    interior_window: float


def _interior_mask(n: int, periodic: bool, edge_fraction: float) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    if not periodic:
        cut = int(math.ceil(edge_fraction * n))
        mask[:cut] = False
        mask[n - cut:] = False
    return mask


def residual_fields(rho: np.ndarray, S: np.ndarray, rho_t: np.ndarray, S_t: np.ndarray,
                    V: np.ndarray, grid: Grid1D, p: ModelParams,
                    floor_rel: float = RESIDUAL_FLOOR_REL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pointwise residuals of both equations and the mask of nodes above the density floor."""
    dx, per = grid.dx, grid.periodic
    hb, m, C = p.hbar, p.m, p.C
    gS = phase_gradient(S, dx, per)
    lS = phase_laplacian(S, dx, per)
    res3 = hb * rho_t + hb**2 / m * gradient(rho * gS, dx, per) - 2.0 * C * laplacian(rho * lS, dx, per)

    ok = rho > floor_rel * float(rho.max())
    r = np.where(ok, rho, 1.0)
    lapR_over_R = laplacian(rho, dx, per) / (2.0 * r) - gradient(rho, dx, per) ** 2 / (4.0 * r**2)
    res4 = hb * S_t - hb**2 / (2.0 * m) * lapR_over_R + V + hb**2 / (2.0 * m) * gS**2 + C * lS**2
    return res3, np.where(ok, res4, 0.0), ok


def residual(family: AnalyticFamily, t: float, grid: Grid1D, p: ModelParams | None = None,
             dt_fd: float = DT_FD, edge_fraction: float = EDGE_FRACTION,
             floor_rel: float = RESIDUAL_FLOOR_REL) -> ResidualReport:
    p = family.params if p is None else p
    if not dt_fd > 0:
        raise ValueError("dt_fd must be positive")
    family.check_time(t - dt_fd, t + dt_fd)
    x = grid.x
    rho, S = family.fields(x, t)
    rho_p, S_p = family.fields(x, t + dt_fd)
    rho_m, S_m = family.fields(x, t - dt_fd)
    rho_t = (rho_p - rho_m) / (2.0 * dt_fd)
    S_t = (S_p - S_m) / (2.0 * dt_fd)
    V = family.potential(x, t)
    res3, res4, ok = residual_fields(rho, S, rho_t, S_t, V, grid, p, floor_rel)

    inside = _interior_mask(grid.n, grid.periodic, edge_fraction)
    m3 = inside
    m4 = inside & ok
    l2 = lambda r, mask: math.sqrt(float(np.sum(r[mask] ** 2)) * grid.dx)
    return ResidualReport(
        res3_max=float(np.max(np.abs(res3[m3]))),
        res3_l2=l2(res3, m3),
        res4_max=float(np.max(np.abs(res4[m4]))),
        res4_l2=l2(res4, m4),
        dx=grid.dx,
        dt_fd=dt_fd,
        interior_window=edge_fraction if not grid.periodic else 0.0,
    )


# --- convergence -------------------------------------------------------------

@dataclass(frozen=True)
class OrderEstimate:
    order: float
    noise_floor: bool
    message: str = ""


def estimate_order(dxs, errors, noise_floor: float = NOISE_FLOOR) -> OrderEstimate:
    """Least-squares slope of log(error) against log(dx).

    Errors that do not decrease monotonically under refinement, or that are
    already at round-off, are reported as a noise floor with order nan.
    """
    dxs = np.asarray(dxs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if dxs.size < 2:
        raise ValueError("need at least two grids")
    order = np.argsort(dxs)[::-1]
    dxs, errors = dxs[order], errors[order]
    if np.all(errors <= noise_floor):
        return OrderEstimate(math.nan, True, f"noise floor reached: all errors <= {noise_floor:g}")
    if np.any(errors <= 0) or np.any(np.diff(errors) >= 0):
        return OrderEstimate(math.nan, True, "noise floor reached: errors not decreasing under refinement")
    slope = np.polyfit(np.log(dxs), np.log(errors), 1)[0]
    return OrderEstimate(float(slope), False)


@dataclass(frozen=True)
class ConvergenceReport:
    reports: list[ResidualReport]
    order3: OrderEstimate
    order4: OrderEstimate

    @property
    def dxs(self) -> list[float]:
        return [r.dx for r in self.reports]


def convergence_order(family: AnalyticFamily, t: float, grid_seq, p: ModelParams | None = None,
                      dt_fd: float = DT_FD, noise_floor: float = NOISE_FLOOR) -> ConvergenceReport:
    """Residual max-norms over a dyadic sequence of grids and their empirical orders.

    grid_seq holds Grid1D objects or plain spacings; spacings use the family's
    default window.
    """
    grids = [g if isinstance(g, Grid1D) else family.default_grid(t, float(g)) for g in grid_seq]
    if len(grids) < 3:
        raise ValueError("convergence study needs at least 3 grids")
    reports = [residual(family, t, g, p, dt_fd) for g in grids]
    dxs = [r.dx for r in reports]
    return ConvergenceReport(
        reports,
        estimate_order(dxs, [r.res3_max for r in reports], noise_floor),
        estimate_order(dxs, [r.res4_max for r in reports], noise_floor),
    )


# --- Ehrenfest ---------------------------------------------------------------

@dataclass(frozen=True)
class EhrenfestReport:
    lhs1: float
    rhs1: float
    correction1: float
    lhs2: float
    rhs2: float
    correction2: float
    mean_p: float
    mean_force: float = field(default=0.0)

    @property
    def standard_defect1(self) -> float:
        """m d<x>/dt - <p>."""
        return self.lhs1 - self.mean_p

    @property
    def standard_defect2(self) -> float:
        """d<p>/dt + <grad V>."""
        return self.lhs2 - self.mean_force


def ehrenfest_corrections(rho: np.ndarray, S: np.ndarray, grid: Grid1D,
                          p: ModelParams) -> tuple[float, float]:
    """The coupling-dependent integrals in the two Ehrenfest relations (1-D)."""
    dx, per = grid.dx, grid.periodic
    gS = phase_gradient(S, dx, per)
    lS = phase_laplacian(S, dx, per)
    lap_g_rho = laplacian(lS * rho, dx, per)
    corr1 = 2.0 * p.C * p.m / p.hbar * integrate(grid.x * lap_g_rho, grid)
    corr2 = p.C * integrate(2.0 * gS * lap_g_rho - rho * gradient(lS**2, dx, per), grid)
    return corr1, corr2


def _moments(family: AnalyticFamily, grid: Grid1D, t: float, p: ModelParams) -> tuple[float, float]:
    rho, S = family.fields(grid.x, t)
    mean_x = integrate(grid.x * rho, grid)
    mean_p = p.hbar * integrate(rho * phase_gradient(S, grid.dx, grid.periodic), grid)
    return mean_x, mean_p


def ehrenfest(family: AnalyticFamily, t: float, grid: Grid1D, p: ModelParams | None = None,
              dt_fd: float = DT_FD) -> EhrenfestReport:
    p = family.params if p is None else p
    if not family.normalizable:
        raise NonNormalizableError("Ehrenfest relations need a normalizable family")
    family.check_time(t - dt_fd, t + dt_fd)
    xp, pp = _moments(family, grid, t + dt_fd, p)
    xm, pm = _moments(family, grid, t - dt_fd, p)
    _, p0 = _moments(family, grid, t, p)
    rho, S = family.fields(grid.x, t)
    corr1, corr2 = ehrenfest_corrections(rho, S, grid, p)
    force = -integrate(rho * family.potential.gradient(grid.x, t), grid)
    lhs1 = p.m * (xp - xm) / (2.0 * dt_fd)
    lhs2 = (pp - pm) / (2.0 * dt_fd)
    return EhrenfestReport(lhs1, p0 + corr1, corr1, lhs2, force + corr2, corr2, p0, force)
