"""Physical constants and the nonlinear coupling.

The coupling ``C`` is the only stored nonlinear parameter. The characteristic
length ``L`` (``|C| = hbar**2 L**2 / m``), the Compton wavelength and the
Compton quotient ``q = L**2 / lambda_c**2`` are derived on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy import constants as _const

ELECTRON_MASS = _const.m_e


@dataclass(frozen=True)
class ModelParams:
    hbar: float = 1.0
    m: float = 1.0
    c: float = 1.0
    C: float = 0.0

    def __post_init__(self) -> None:
        for name in ("hbar", "m", "c"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.C):
            raise ValueError(f"C must be finite, got {self.C!r}")

    @classmethod
    def natural(cls, C: float = 0.0) -> "ModelParams":
        """hbar = m = c = 1."""
        return cls(1.0, 1.0, 1.0, C)

    @classmethod
    def si(cls, m: float = ELECTRON_MASS, C: float = 0.0) -> "ModelParams":
        """CODATA hbar and c; mass defaults to the electron."""
        return cls(_const.hbar, m, _const.c, C)

    @classmethod
    def preset(cls, name: str, **overrides: float) -> "ModelParams":
        if name == "natural":
            base = cls.natural()
        elif name == "si":
            base = cls.si()
        else:
            raise ValueError(f"unknown preset {name!r} (expected 'natural' or 'si')")
        return replace(base, **overrides) if overrides else base

    def with_coupling(self, C: float) -> "ModelParams":
        return replace(self, C=C)

    def with_length(self, L: float, sign: int = -1) -> "ModelParams":
        return replace(self, C=coupling_from_length(L, self, sign))

    def with_compton_quotient(self, q: float, sign: int = -1) -> "ModelParams":
        lam, _ = compton(self)
        return self.with_length(math.sqrt(q) * lam, sign)

    @property
    def L(self) -> float:
        return characteristic_length(self)

    @property
    def sign(self) -> int:
        return coupling_sign(self)


def characteristic_length(p: ModelParams) -> float:
    """L = sqrt(|C| m) / hbar; zero coupling gives L = 0."""
    return math.sqrt(abs(p.C) * p.m) / p.hbar


def coupling_sign(p: ModelParams) -> int:
    return (p.C > 0) - (p.C < 0)


def coupling_from_length(L: float, p: ModelParams, sign: int = -1) -> float:
    if L < 0:
        raise ValueError("characteristic length must be non-negative")
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    return sign * p.hbar**2 * L**2 / p.m


def compton(p: ModelParams) -> tuple[float, float]:
    """Return (lambda_c, q) with lambda_c = hbar/(m c) and q = L**2/lambda_c**2."""
    lam = p.hbar / (p.m * p.c)
    L = characteristic_length(p)
    return lam, (L / lam) ** 2


def subrelativistic_coupling(p: ModelParams) -> float:
    """Coupling for which the soliton self-energy equals m c**2.

    The implied characteristic length is lambda_c / 4.
    """
    return -(p.hbar**4) / (16.0 * p.m**3 * p.c**2)
