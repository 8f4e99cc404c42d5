"""Closed-form solution families of the phase-modified Schrodinger equation.

Every family evaluates (rho, S) on arbitrary points and times, knows the
potential that supports it, and carries its closed-form energy. The packet
formulas are written with hbar = 1 and restored through the substitution
m -> m/hbar, C -> C/hbar, V -> V/hbar, which leaves both equations of motion
invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (
    ComovingHarmonicPotential,
    Grid1D,
    HarmonicPotential,
    HydroState,
    TimeDependentHarmonicPotential,
    ZeroPotential,
)
from .params import ModelParams, characteristic_length

DEFAULT_WIDTHS = 8.0


class PoleError(ValueError):
    """A closed form is singular at the requested time."""


class AnalyticFamily:
    """Common surface of the closed-form families."""

    name: str = "family"
    normalizable: bool = True
    params: ModelParams

    def fields(self, x, t: float) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    @property
    def potential(self):
        raise NotImplementedError

    def center(self, t: float) -> float:
        raise NotImplementedError

    def width(self, t: float) -> float:
        """Standard deviation of rho."""
        raise NotImplementedError

    def energy(self, t: float = 0.0) -> float:
        raise NotImplementedError

    def check_time(self, t_lo: float, t_hi: float | None = None) -> None:
        """Raise PoleError if the closed form is singular in [t_lo, t_hi]."""

    def default_grid(self, t: float, dx: float, widths: float = DEFAULT_WIDTHS) -> Grid1D:
        return Grid1D.centered(self.center(t), widths * self.width(t), dx)

    def state(self, grid: Grid1D, t: float) -> HydroState:
        rho, S = self.fields(grid.x, t)
        return HydroState(t, rho, S, non_normalizable=not self.normalizable)


# --- coherent state ----------------------------------------------------------

@dataclass(frozen=True)
class CoherentState(AnalyticFamily):
    params: ModelParams
    omega: float
    alpha_abs: float = 0.0
    delta: float = 0.0
    name = "coherent"

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError("coherent state needs omega > 0")
        if self.alpha_abs < 0:
            raise ValueError("alpha_abs must be non-negative")

    @property
    def x0(self) -> float:
        p = self.params
        return math.sqrt(p.hbar / (p.m * self.omega))

    @property
    def potential(self) -> HarmonicPotential:
        return HarmonicPotential(0.5 * self.params.m * self.omega**2)

    def center(self, t: float) -> float:
        # |alpha| in the center keeps (rho, S) a solution for every alpha
        return math.sqrt(2.0) * self.x0 * self.alpha_abs * math.cos(self.omega * t - self.delta)

    def width(self, t: float) -> float:
        return self.x0 / math.sqrt(2.0)

    def fields(self, x, t: float):
        x = np.asarray(x, dtype=float)
        x0, a = self.x0, self.alpha_abs
        theta = self.omega * t - self.delta
        rho = np.exp(-((x - self.center(t)) ** 2) / x0**2) / (math.sqrt(math.pi) * x0)
        S = -(0.5 * self.omega * t - 0.5 * a**2 * math.sin(2.0 * theta)
              + math.sqrt(2.0) * a * x * math.sin(theta) / x0)
        return rho, S

    def energy(self, t: float = 0.0) -> float:
        return self.params.hbar * self.omega * (self.alpha_abs**2 + 0.5)


# --- modified Gaussian packet ------------------------------------------------

def _reduced(p: ModelParams) -> tuple[float, float]:
    return p.m / p.hbar, p.C / p.hbar


def packet_B2(t0: float, p: ModelParams) -> float:
    mu, kap = _reduced(p)
    return t0**2 + 4.0 * kap * mu**2 * t0


def _packet_denominator(t: float, t0: float, p: ModelParams) -> float:
    den = t**2 + packet_B2(t0, p)
    if den == 0.0:
        raise PoleError(f"packet closed form is singular at t={t!r} (t0={t0!r})")
    return den


def packet_critical_t0(p: ModelParams) -> tuple[float, float]:
    """(t0 below which the energy has poles, t0 below which E(0) < 0)."""
    if p.C >= 0:
        return 0.0, 0.0
    mu, kap = _reduced(p)
    return 4.0 * abs(kap) * mu**2, 8.0 * abs(kap) * mu**2


def packet_f(t: float, t0: float, p: ModelParams) -> float:
    """Coefficient of x**2/2 added to the linear packet phase."""
    _check_t0(t0)
    mu, kap = _reduced(p)
    D = t**2 + t0**2
    return -4.0 * kap * mu**3 * t0 * t / (D * _packet_denominator(t, t0, p))


def packet_g(t: float, t0: float, p: ModelParams) -> float:
    """Laplacian of the packet phase, constant in x."""
    _check_t0(t0)
    mu, _ = _reduced(p)
    return mu * t / _packet_denominator(t, t0, p)


def packet_potential_A(t: float, t0: float, p: ModelParams) -> float:
    """Strength A(t) of the supporting potential V = A(t) x**2."""
    _check_t0(t0)
    mu, kap = _reduced(p)
    D = t**2 + t0**2
    den = _packet_denominator(t, t0, p)
    return -p.hbar * 2.0 * kap * mu**3 * t0 * (t**4 - t0**3 * (t0 + 4.0 * kap * mu**2)) / (D**2 * den**2)


def packet_h(t: float, t0: float, p: ModelParams) -> float:
    """Time-only phase h(t) with h(0) = 0 and dh/dt = -(C/hbar) g(t)**2."""
    _check_t0(t0)
    mu, kap = _reduced(p)
    if kap == 0.0:
        return 0.0
    B2 = packet_B2(t0, p)
    pref = kap * mu**2 / 2.0
    if B2 > 0:
        B = math.sqrt(B2)
        return -pref * (math.atan(t / B) / B - t / (t**2 + B2))
    if B2 == 0:
        raise PoleError("packet phase is singular for t0 at the first critical value")
    b = math.sqrt(-B2)
    if abs(t) == b:
        raise PoleError(f"packet phase has a logarithmic pole at |t| = {b!r}")
    return pref * (t / (t**2 - b**2) + math.log(abs((t + b) / (t - b))) / (2.0 * b))


def packet_energy(t: float, t0: float, p: ModelParams) -> float:
    """Closed-form energy of the modified packet in its supporting potential."""
    _check_t0(t0)
    mu, kap = _reduced(p)
    k4 = kap * mu**2
    D = t**2 + t0**2
    den = _packet_denominator(t, t0, p)
    num = (t**6 + 3.0 * t0**2 * t**4
           + t0**2 * (t0**2 + 2.0 * t0 * (t0 + 6.0 * k4)) * t**2
           + ((t0 + 4.0 * k4) ** 2 + 4.0 * k4 * (t0 + 4.0 * k4)) * t0**4)
    return p.hbar * num / (4.0 * t0 * D * den**2)


def packet_mean_p2(t0: float, p: ModelParams) -> float:
    """<p^2> of the packet at t = 0, hbar m / (2 t0)."""
    return p.hbar * p.m / (2.0 * t0)


def _check_t0(t0: float) -> None:
    if not t0 > 0:
        raise ValueError("packet needs t0 > 0")


@dataclass(frozen=True)
class ModifiedPacket(AnalyticFamily):
    params: ModelParams
    t0: float
    name = "packet"

    def __post_init__(self) -> None:
        _check_t0(self.t0)
        cr1, _ = packet_critical_t0(self.params)
        if self.params.C < 0 and not self.t0 > cr1:
            raise ValueError(
                f"t0={self.t0!r} is not above the critical value {cr1!r}; energy unbounded")

    @property
    def potential(self):
        t0, p = self.t0, self.params
        if p.C == 0:
            return ZeroPotential()
        return TimeDependentHarmonicPotential(lambda t: packet_potential_A(t, t0, p))

    def center(self, t: float) -> float:
        return 0.0

    def width(self, t: float) -> float:
        mu, _ = _reduced(self.params)
        return math.sqrt((t**2 + self.t0**2) / (2.0 * mu * self.t0))

    def fields(self, x, t: float):
        x = np.asarray(x, dtype=float)
        mu, _ = _reduced(self.params)
        t0 = self.t0
        D = t**2 + t0**2
        rho = np.sqrt(mu * t0 / (math.pi * D)) * np.exp(-mu * t0 * x**2 / D)
        S_lin = mu * t * x**2 / (2.0 * D) - 0.5 * math.atan(t / t0)
        S = S_lin + 0.5 * packet_f(t, t0, self.params) * x**2 + packet_h(t, t0, self.params)
        return rho, S

    def energy(self, t: float = 0.0) -> float:
        return packet_energy(t, self.t0, self.params)

    def check_time(self, t_lo: float, t_hi: float | None = None) -> None:
        t_hi = t_lo if t_hi is None else t_hi
        B2 = packet_B2(self.t0, self.params)
        if B2 > 0:
            return
        b = math.sqrt(-B2)
        for pole in (-b, b):
            if t_lo <= pole <= t_hi:
                raise PoleError(f"packet pole at t={pole!r} inside [{t_lo!r}, {t_hi!r}]")


# --- solitons ----------------------------------------------------------------

def _require_negative_coupling(p: ModelParams) -> None:
    if not p.C < 0:
        raise ValueError("solitons require negative coupling (C < 0)")


@dataclass(frozen=True)
class FreeSoliton(AnalyticFamily):
    """Non-dispersive Gaussian: R = N exp(-xi^2/s^2), S = a xi^2 + b v x + c(t)."""

    params: ModelParams
    v: float = 0.0
    sign: int = 1
    x_c: float = 0.0
    name = "soliton"

    def __post_init__(self) -> None:
        _require_negative_coupling(self.params)
        if self.sign not in (-1, 1):
            raise ValueError("sign must be -1 or +1")

    @property
    def s(self) -> float:
        p = self.params
        return math.sqrt(8.0 * p.m * abs(p.C)) / p.hbar

    @property
    def a(self) -> float:
        p = self.params
        return self.sign * p.hbar**2 / (8.0 * p.m * abs(p.C))

    @property
    def b(self) -> float:
        return self.params.m / self.params.hbar

    @property
    def L(self) -> float:
        return characteristic_length(self.params)

    @property
    def physical_size(self) -> float:
        return math.sqrt(2.0) * self.s

    @property
    def phase_rate(self) -> float:
        """dc/dt; c(t) = phase_rate * t."""
        p = self.params
        a2 = self.a**2
        return (-p.hbar / (p.m * self.s**2) - p.m * self.v**2 / (2.0 * p.hbar)
                - 4.0 * p.C * a2 / p.hbar)

    def c(self, t: float) -> float:
        return self.phase_rate * t

    @property
    def potential(self):
        return ZeroPotential()

    def center(self, t: float) -> float:
        return self.x_c + self.v * t

    def width(self, t: float) -> float:
        return self.s / 2.0

    def fields(self, x, t: float):
        x = np.asarray(x, dtype=float)
        s = self.s
        xi = x - self.center(t)
        rho = math.sqrt(2.0 / math.pi) / s * np.exp(-2.0 * xi**2 / s**2)
        S = self.a * xi**2 + self.b * self.v * x + self.c(t)
        return rho, S

    def stationary_energy(self) -> float:
        p = self.params
        return p.hbar**2 / (16.0 * p.m * self.L**2)

    def energy(self, t: float = 0.0) -> float:
        return self.stationary_energy() + 0.5 * self.params.m * self.v**2


def free_soliton(p: ModelParams, v: float = 0.0, sign: int = 1, x_c: float = 0.0) -> FreeSoliton:
    return FreeSoliton(p, v, sign, x_c)


def soliton_energy(sol: FreeSoliton, p: ModelParams | None = None) -> float:
    return sol.energy()


def critical_strength(p: ModelParams) -> float:
    """Largest oscillator strength k = hbar^2/(32 m L^4) that supports a soliton."""
    _require_negative_coupling(p)
    L = characteristic_length(p)
    return p.hbar**2 / (32.0 * p.m * L**4)


def stationary_energy_in_oscillator(L: float, k: float, p: ModelParams) -> float:
    """hbar^2/(16 m L^2) + 2 k L^2."""
    return p.hbar**2 / (16.0 * p.m * L**2) + 2.0 * k * L**2


@dataclass(frozen=True)
class OscillatorSoliton(FreeSoliton):
    """Soliton riding in V = k (x - x_c - v t)^2."""

    k: float = 0.0
    name = "oscillator_soliton"

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.k < 0:
            raise ValueError("oscillator strength k must be non-negative")
        if self.k > critical_strength(self.params):
            raise ValueError(
                f"overcritical potential strength k={self.k!r} > k_crit={critical_strength(self.params)!r}")

    @property
    def a(self) -> float:
        # 1/s^4 - k m / (2 hbar^2), factored so a = 0 exactly at k = k_crit
        a2 = (1.0 - self.k / critical_strength(self.params)) / self.s**4
        return self.sign * math.sqrt(max(a2, 0.0))

    @property
    def potential(self) -> ComovingHarmonicPotential:
        return ComovingHarmonicPotential(self.k, self.v, self.x_c)

    def stationary_energy(self) -> float:
        return stationary_energy_in_oscillator(self.L, self.k, self.params)


def oscillator_soliton(p: ModelParams, k: float, v: float = 0.0, sign: int = 1,
                       x_c: float = 0.0) -> OscillatorSoliton:
    return OscillatorSoliton(p, v, sign, x_c, k)


# --- plane wave --------------------------------------------------------------

@dataclass(frozen=True)
class PlaneWave(AnalyticFamily):
    """Uniform density on a periodic domain of the given length.

    The energy defaults to m v^2/2 + m c^2, so the phase is
    m v x/hbar - (E - m c^2) t/hbar.
    """

    params: ModelParams
    v: float
    length: float
    E: float | None = None
    name = "plane_wave"
    normalizable = False

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise ValueError("plane wave needs a positive domain length")

    @classmethod
    def commensurate(cls, p: ModelParams, v: float, length: float,
                     E: float | None = None) -> "PlaneWave":
        """Snap v so exp(iS) is periodic on the domain."""
        quantum = 2.0 * math.pi * p.hbar / (p.m * length)
        return cls(p, round(v / quantum) * quantum, length, E)

    @property
    def energy_value(self) -> float:
        p = self.params
        return 0.5 * p.m * self.v**2 + p.m * p.c**2 if self.E is None else self.E

    @property
    def potential(self):
        return ZeroPotential()

    def center(self, t: float) -> float:
        return 0.5 * self.length

    def width(self, t: float) -> float:
        return self.length / math.sqrt(12.0)

    def fields(self, x, t: float):
        p = self.params
        x = np.asarray(x, dtype=float)
        rho = np.full_like(x, 1.0 / self.length)
        S = p.m * self.v * x / p.hbar - (self.energy_value - p.m * p.c**2) * t / p.hbar
        return rho, S

    def energy(self, t: float = 0.0) -> float:
        return self.energy_value

    def default_grid(self, t: float, dx: float, widths: float = DEFAULT_WIDTHS) -> Grid1D:
        n = round(self.length / dx)
        if abs(n * dx - self.length) > 1e-9 * self.length:
            raise ValueError("dx must divide the plane-wave domain length")
        return Grid1D(0.0, self.length, n, periodic=True)


def plane_wave_eval(pw: PlaneWave, x, t: float, p: ModelParams | None = None):
    return pw.fields(x, t)


def coherent_eval(cs: CoherentState, x, t: float, p: ModelParams | None = None):
    return cs.fields(x, t)
