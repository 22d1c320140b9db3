"""Simulation of conclusive teleportation over nonmaximally entangled channels.

Three linear-optical schemes are modelled: a single photon shared between two
modes, the same in polarization encoding, and an entangled coherent state.
"""

from .coherent import CoherentSuperposition, ParityClass
from .fock import BeamSplitter, CutoffError, FockState, PolarizingBeamSplitter
from .protocols import ProtocolResult, QubitSpec, ToleranceError, run_protocol

__all__ = [
    "BeamSplitter",
    "CoherentSuperposition",
    "CutoffError",
    "FockState",
    "ParityClass",
    "PolarizingBeamSplitter",
    "ProtocolResult",
    "QubitSpec",
    "ToleranceError",
    "run_protocol",
]
__version__ = "0.1.0"
