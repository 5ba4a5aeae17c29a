"""Parity-dependent Zitterbewegung of a trapped ion simulating the 1+1D Dirac equation."""

__version__ = "0.1.0"

from .core import (
    BasisIndex,
    OperatorMatrix,
    PhysicalParams,
    QuantumState,
    Spin,
    build_hamiltonian,
    build_ladder,
    build_momentum,
    build_parity,
    build_position,
)
from .dynamics import SimulationConfig, TimeSeries, evolve, run_simulation, velocity_consistency
from .spectral import SpectrumResult, diagonalize, energy_spinors, momentum_eigenstate, parity_coeigenstate
