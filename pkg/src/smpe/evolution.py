"""Method-of-lines time integration with classic 4-stage Runge-Kutta.

States enter and leave as (rho, S). The stepper advances the equivalent
complex field psi = sqrt(rho) exp(iS),

    dpsi/dt = (i hbar/2m) lap(psi) - (i/hbar) V psi
              + (C/hbar) [lap(rho g)/rho - i g^2] psi,      g = lap(S),

which is the same pair of equations of motion written in one variable. Marching
(rho, S) directly is unstable in Gaussian tails: relative perturbations grow
there at a rate proportional to |grad log rho| times the wavenumber, so even
C = 0 runs blew up within t ~ 0.5. Norm is never renormalized; drift is
reported and aborts the run above ``norm_tol``.

For C < 0 the equations themselves are linearly unstable at short
wavelengths (growth rate ~ sqrt(|C|/2m) k^3 in natural units) and every run
ends in BlowUpError or NormDriftError after a time that shrinks like dx^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import (
    Grid1D,
    HydroState,
    energy,
    gradient,
    laplacian,
    observables,
    phase_gradient,
    phase_laplacian,
)
from .params import ModelParams

DENSITY_FLOOR_REL = 1e-12
KINETIC_DT_FACTOR = 0.2
COUPLING_DT_FACTOR = 0.05
BOUNDARIES = ("clamp", "periodic")


class EvolutionError(RuntimeError):
    def __init__(self, message: str, step: int, t: float, trace: "EvolutionTrace | None" = None):
        super().__init__(message)
        self.step = step
        self.t = t
        self.trace = trace


class BlowUpError(EvolutionError):
    pass


class NormDriftError(EvolutionError):
    pass


@dataclass(frozen=True)
class EvolutionConfig:
    grid: Grid1D
    t_end: float
    dt: float | str = "auto"
    save_every: int = 100
    density_floor_rel: float = DENSITY_FLOOR_REL
    boundary: str = "clamp"
    norm_tol: float = 1e-3

    def __post_init__(self) -> None:
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ValueError("dt must be 'auto' or a positive number")
        if self.save_every < 1:
            raise ValueError("save_every must be >= 1")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if (self.boundary == "periodic") != self.grid.periodic:
            raise ValueError("periodic boundary requires a periodic grid and vice versa")


@dataclass(frozen=True)
class TraceRecord:
    t: float
    norm: float
    mean_x: float
    mean_p: float
    width: float
    energy: float
    res_proxy: float


@dataclass
class EvolutionTrace:
    records: list[TraceRecord] = field(default_factory=list)
    final: HydroState | None = None
    dt: float = 0.0
    steps: int = 0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def norm_drift(self) -> float:
        n = self.column("norm")
        return float(np.max(np.abs(n - n[0])))

    @property
    def energy_drift_rel(self) -> float:
        e = self.column("energy")
        return float(np.max(np.abs(e - e[0])) / abs(e[0]))


def auto_dt(grid: Grid1D, p: ModelParams) -> float:
    dx = grid.dx
    dt = KINETIC_DT_FACTOR * p.m * dx**2 / p.hbar
    if p.C != 0:
        dt = min(dt, COUPLING_DT_FACTOR * p.hbar * dx**4 / abs(p.C))
    return dt


def run_grid(family, t_start: float, t_end: float, dx: float, widths: float = 10.0,
             samples: int = 65) -> Grid1D:
    """Clamped grid covering the family's track over [t_start, t_end] with `widths` margins.

    Ten standard deviations put Gaussian tails near 1e-22 of the peak, so the
    pinned end nodes never see the packet.
    """
    if getattr(family, "normalizable", True) is False:
        return family.default_grid(t_start, dx)
    ts = np.linspace(t_start, t_end, samples)
    centers = [family.center(t) for t in ts]
    margin = widths * max(family.width(t) for t in ts)
    lo, hi = min(centers) - margin, max(centers) + margin
    mid = 0.5 * (lo + hi)
    return Grid1D.centered(mid, 0.5 * (hi - lo), dx)


def _lap_R_over_R(rho: np.ndarray, dx: float, periodic: bool, floor_rel: float) -> np.ndarray:
    r = np.maximum(rho, floor_rel * float(rho.max()))
    return laplacian(rho, dx, periodic) / (2.0 * r) - gradient(rho, dx, periodic) ** 2 / (4.0 * r**2)


def rhs(state: HydroState, V, p: ModelParams, grid: Grid1D,
        density_floor_rel: float = DENSITY_FLOOR_REL) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives (drho/dt, dS/dt) of the hydrodynamic equations."""
    dx, per = grid.dx, grid.periodic
    hb, m, C = p.hbar, p.m, p.C
    rho, S = state.rho, state.S
    # non-finite values are reported below, not warned about
    with np.errstate(invalid="ignore", over="ignore"):
        gS = phase_gradient(S, dx, per)
        lS = phase_laplacian(S, dx, per)
        drho = -(hb / m) * gradient(rho * gS, dx, per) + (2.0 * C / hb) * laplacian(rho * lS, dx, per)
        dS = ((hb / (2.0 * m)) * _lap_R_over_R(rho, dx, per, density_floor_rel)
              - V(grid.x, state.t) / hb - (hb / (2.0 * m)) * gS**2 - (C / hb) * lS**2)
    bad = ~(np.isfinite(drho) & np.isfinite(dS))
    if bad.any():
        raise BlowUpError(f"blow-up detected at node {int(np.argmax(bad))}", 0, state.t)
    return drho, dS


def _complex_lap(psi: np.ndarray, dx: float, periodic: bool) -> np.ndarray:
    if periodic:
        return (np.roll(psi, -1) - 2.0 * psi + np.roll(psi, 1)) / dx**2
    out = np.zeros_like(psi)
    out[1:-1] = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / dx**2
    return out


def _complex_grad(psi: np.ndarray, dx: float, periodic: bool) -> np.ndarray:
    if periodic:
        return (np.roll(psi, -1) - np.roll(psi, 1)) / (2.0 * dx)
    out = np.zeros_like(psi)
    out[1:-1] = (psi[2:] - psi[:-2]) / (2.0 * dx)
    return out


class _FieldStepper:
    def __init__(self, grid: Grid1D, V, p: ModelParams, floor_rel: float):
        self.x = grid.x
        self.dx = grid.dx
        self.periodic = grid.periodic
        self.V = V
        self.p = p
        self.floor_rel = floor_rel

    def __call__(self, psi: np.ndarray, t: float) -> np.ndarray:
        hb, m, C = self.p.hbar, self.p.m, self.p.C
        dx, per = self.dx, self.periodic
        lap = _complex_lap(psi, dx, per)
        out = (0.5j * hb / m) * lap - (1j / hb) * self.V(self.x, t) * psi
        if C != 0:
            rho = (psi * psi.conj()).real
            floor = self.floor_rel * float(rho.max())
            ok = rho > floor
            rf = np.where(ok, rho, floor)
            w = psi.conj() * _complex_grad(psi, dx, per)
            z = psi.conj() * lap
            g = np.where(ok, z.imag / rf - 2.0 * w.real * w.imag / rf**2, 0.0)
            lap_rho_g = laplacian(rho * g, dx, per)
            out = out + (C / hb) * (lap_rho_g / rf - 1j * g**2) * psi
        if not per:
            out[0] = 0.0
            out[-1] = 0.0
        return out


def _to_psi(state: HydroState) -> np.ndarray:
    return np.sqrt(state.rho) * np.exp(1j * state.S)


def _to_state(psi: np.ndarray, t: float, non_normalizable: bool) -> HydroState:
    rho = (psi * psi.conj()).real
    S = np.unwrap(np.angle(psi))
    return HydroState(t, rho, S, non_normalizable)


def _record(state: HydroState, psi_t: np.ndarray, psi: np.ndarray, V, grid: Grid1D,
            p: ModelParams) -> TraceRecord:
    if state.non_normalizable:
        norm = float(np.sum(state.rho) * grid.dx)
        mean_p = p.hbar * float(np.sum(state.rho * phase_gradient(state.S, grid.dx, True)) * grid.dx)
        obs_x, obs_w, E = math.nan, math.nan, math.nan
    else:
        obs = observables(state, grid, p)
        norm, mean_p, obs_x, obs_w = obs.norm, obs.mean_p, obs.mean_x, obs.width
        E = energy(state, grid, V, p)
    # continuity defect of the stepped field measured with the hydrodynamic stencils
    rho_t = 2.0 * (psi.conj() * psi_t).real
    dx, per = grid.dx, grid.periodic
    gS = phase_gradient(state.S, dx, per)
    lS = phase_laplacian(state.S, dx, per)
    defect = (p.hbar * rho_t + p.hbar**2 / p.m * gradient(state.rho * gS, dx, per)
              - 2.0 * p.C * laplacian(state.rho * lS, dx, per))
    inner = defect if per else defect[2:-2]
    return TraceRecord(state.t, norm, obs_x, mean_p, obs_w, E, float(np.max(np.abs(inner))))


def evolve(initial: HydroState, V, cfg: EvolutionConfig, p: ModelParams) -> EvolutionTrace:
    grid = cfg.grid
    if initial.rho.size != grid.n:
        raise ValueError("initial state does not match the grid")
    dt_target = auto_dt(grid, p) if cfg.dt == "auto" else float(cfg.dt)
    steps = max(1, math.ceil(cfg.t_end / dt_target - 1e-12))
    dt = cfg.t_end / steps
    f = _FieldStepper(grid, V, p, cfg.density_floor_rel)
    nn = initial.non_normalizable

    psi = _to_psi(initial)
    t0 = initial.t
    trace = EvolutionTrace(dt=dt, steps=0)
    trace.records.append(_record(initial, f(psi, t0), psi, V, grid, p))
    norm0 = trace.records[0].norm

    for step in range(1, steps + 1):
        t = t0 + (step - 1) * dt
        with np.errstate(invalid="ignore", over="ignore"):
            k1 = f(psi, t)
            k2 = f(psi + 0.5 * dt * k1, t + 0.5 * dt)
            k3 = f(psi + 0.5 * dt * k2, t + 0.5 * dt)
            k4 = f(psi + dt * k3, t + dt)
            psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = t0 + step * dt
        trace.steps = step

        if not np.all(np.isfinite(psi)):
            trace.final = None
            raise BlowUpError(f"blow-up detected at step {step} (t={t_new:.6g})", step, t_new, trace)
        norm = float(np.sum((psi * psi.conj()).real) * grid.dx)
        if abs(norm - norm0) > cfg.norm_tol or not math.isfinite(norm):
            trace.final = _safe_state(psi, t_new, nn)
            raise NormDriftError(
                f"norm drift {abs(norm - norm0):.3e} exceeds {cfg.norm_tol:g} at step {step} "
                f"(t={t_new:.6g})", step, t_new, trace)
        if step % cfg.save_every == 0 or step == steps:
            state = _to_state(psi, t_new, nn)
            trace.records.append(_record(state, f(psi, t_new), psi, V, grid, p))

    trace.final = _to_state(psi, t0 + steps * dt, nn)
    return trace


def _safe_state(psi: np.ndarray, t: float, nn: bool) -> HydroState | None:
    try:
        return _to_state(psi, t, nn)
    except ValueError:
        return None
