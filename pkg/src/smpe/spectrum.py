"""Extra nodeless level of the harmonic oscillator for negative coupling.

For an oscillator of angular frequency omega the soliton stationary energy is
hbar^2/(16 m L^2) + m omega^2 L^2, which lies above the linear ground state
hbar omega / 2 unless L equals L_max = sqrt(hbar / (4 m omega)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import stationary_energy_in_oscillator
from .params import ModelParams, characteristic_length, compton


class SpectrumError(ValueError):
    pass


def omega_crit(p: ModelParams) -> float:
    """hbar / (4 m L^2)."""
    L = characteristic_length(p)
    if L == 0:
        raise SpectrumError("critical frequency needs a nonzero coupling")
    return p.hbar / (4.0 * p.m * L**2)


def L_max(omega: float, p: ModelParams) -> float:
    if not omega > 0:
        raise SpectrumError("omega must be positive")
    return math.sqrt(p.hbar / (4.0 * p.m * omega))


@dataclass(frozen=True)
class SpectrumLine:
    omega: float
    omega_crit: float
    Q_h: float
    eta: float
    E_st: float
    delta_E_new: float
    ratio: float


def new_line(omega: float, p: ModelParams) -> SpectrumLine:
    if not p.C < 0:
        raise SpectrumError("the extra level needs negative coupling (C < 0)")
    w_c = omega_crit(p)
    if not 0 < omega <= w_c:
        raise SpectrumError(
            f"no nonlinear nodeless state: omega={omega!r} outside (0, omega_crit={w_c!r}]")
    L = characteristic_length(p)
    Q = (L / L_max(omega, p)) ** 2
    eta = omega / w_c
    E_st = 0.25 * p.hbar * omega * (1.0 / Q + Q)
    delta = 0.25 * p.hbar * omega * (1.0 / Q + Q - 2.0)
    ratio = (1.0 - eta) ** 2 / (4.0 * eta)
    return SpectrumLine(omega, w_c, Q, eta, E_st, delta, ratio)


def level_ratio(eta: float) -> float:
    """Offset of the extra level in units of hbar*omega."""
    if not 0 < eta <= 1:
        raise SpectrumError("eta must lie in (0, 1]")
    return (1.0 - eta) ** 2 / (4.0 * eta)


def omega_crit_hz(m_particle: float, q: float, p: ModelParams) -> float:
    """Critical ordinary frequency m c^2 / (8 pi q hbar).

    q is the particle's own Compton quotient L^2 / lambda_c^2 with
    lambda_c = hbar / (m_particle c).
    """
    if not q > 0:
        raise SpectrumError("q must be positive")
    return m_particle * p.c**2 / (8.0 * math.pi * q * p.hbar)


def omega_creat(p: ModelParams) -> float:
    """Upper edge of the subrelativistic regime, 2 sqrt(2) m c^2 / hbar."""
    return 2.0 * math.sqrt(2.0) * p.m * p.c**2 / p.hbar


def subrelativistic_line(omega: float, p: ModelParams) -> tuple[float, float]:
    """Stationary soliton energy at L = lambda_c/4 in an oscillator of frequency omega.

    Returns (E_st, omega_creat) with E_st = m c^2 + m lambda_c^2 omega^2 / 16.
    """
    w_creat = omega_creat(p)
    if not 0 < omega < w_creat:
        raise SpectrumError(
            f"particle creation regime: omega={omega!r} not in (0, omega_creat={w_creat!r})")
    lam, _ = compton(p)
    return p.m * p.c**2 + p.m * lam**2 * omega**2 / 16.0, w_creat


def subrelativistic_line_from_oscillator(omega: float, p: ModelParams) -> float:
    """Same energy via the general oscillator-soliton formula (cross-check path)."""
    lam, _ = compton(p)
    return stationary_energy_in_oscillator(lam / 4.0, 0.5 * p.m * omega**2, p)
