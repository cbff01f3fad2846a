"""Quantum dynamics and high-harmonic spectra of a hydrogen-like atom
confined in a spherical box with a harmonically oscillating radius.

All quantities are in atomic units (hbar = m_e = e = 1): lengths in bohr,
energies in hartree, times in hbar/hartree.
"""

from .boundary import BreathingLaw, MultichromaticCoefficients
from .basis import BasisSet, build_basis
from .hamiltonian import HamiltonianMatrices, build_matrices, assemble_v
from .propagator import (
    SimulationConfig,
    InitialState,
    CoefficientState,
    Trajectory,
    NormDriftError,
    propagate,
    diagonalize_static,
)
from .observables import DipoleSeries, dipole, dipole_series, populations
from .spectrum import PowerSpectrum, power_spectrum, harmonic_peaks

__version__ = "0.1.0"

__all__ = [
    "BreathingLaw",
    "MultichromaticCoefficients",
    "BasisSet",
    "build_basis",
    "HamiltonianMatrices",
    "build_matrices",
    "assemble_v",
    "SimulationConfig",
    "InitialState",
    "CoefficientState",
    "Trajectory",
    "NormDriftError",
    "propagate",
    "diagonalize_static",
    "DipoleSeries",
    "dipole",
    "dipole_series",
    "populations",
    "PowerSpectrum",
    "power_spectrum",
    "harmonic_peaks",
    "__version__",
]
