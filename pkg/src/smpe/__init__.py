"""Schrodinger dynamics with a phase-curvature nonlinearity in hydrodynamic form."""

from .params import ModelParams
from .fields import Grid1D, HydroState
from .analytic import (
    CoherentState,
    FreeSoliton,
    ModifiedPacket,
    OscillatorSoliton,
    PlaneWave,
)

__all__ = [
    "ModelParams", "Grid1D", "HydroState",
    "CoherentState", "FreeSoliton", "ModifiedPacket", "OscillatorSoliton", "PlaneWave",
]
__version__ = "0.1.0"
