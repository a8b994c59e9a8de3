"""Bound states of the uniaxial anisotropic exciton in the Fock representation."""

from .basis import QuantumNumbers, Sector, SectorBasis, gamma_from_materials, sector_states, state_index
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "QuantumNumbers",
    "Sector",
    "SectorBasis",
    "gamma_from_materials",
    "sector_states",
    "state_index",
]

__version__ = "0.1.0"
