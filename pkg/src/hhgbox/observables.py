"""Physical observables of a propagated state.

The central one is the average dipole moment. In the scaled coordinate the
radial expectation factorizes, d(t) = -r0(t) <y>, because |R|^2 r^2 dr =
|Phi|^2 dy with r = r0 y and the gauge phase attached to the wave-function
transformation cancels in the modulus. In the coefficient representation
<y> is the quadratic form C^H M_y C.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BreathingLaw, radius
from .hamiltonian import HamiltonianMatrices, assemble_v
from .basis import BasisSet
from .propagator import CoefficientState, Trajectory

_IMAG_TOLERANCE = 1e-10

CSV_UNITS_HEADER = "# atomic units: hbar = m_e = e = 1 (bohr, hartree, hbar/hartree)"


def dipole(state: CoefficientState, m_y: np.ndarray, law: BreathingLaw) -> float:
    """Average dipole moment d(t) = -r0(t) * C^H M_y C for a normalized state.

    The quadratic form is real for a symmetric real M_y; an imaginary
    residue above 1e-10 signals corrupted matrices or state and raises.
    """
    val = np.vdot(state.c, m_y @ state.c)
    if abs(val.imag) > _IMAG_TOLERANCE:
        raise RuntimeError(
            f"dipole expectation has imaginary residue {val.imag:.3e}; "
            "matrix elements or state are inconsistent"
        )
    return -float(radius(law, state.t)) * val.real


@dataclass(frozen=True)
class DipoleSeries:
    """Sampled dipole moment d(t_k) on a uniform time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have identical shape")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(CSV_UNITS_HEADER + "\n")
            fh.write("t,dipole\n")
            for t, d in zip(self.times, self.values):
                fh.write(f"{t:.17g},{d:.17g}\n")


def dipole_series(
    trajectory: Trajectory, matrices: HamiltonianMatrices, law: BreathingLaw
) -> DipoleSeries:
    """Dipole moment evaluated at every sample of a trajectory."""
    coeffs = trajectory.coefficients
    times = trajectory.times
    expect_y = np.real(np.einsum("ki,ij,kj->k", coeffs.conj(), matrices.m_y, coeffs))
    imag = np.imag(np.einsum("ki,ij,kj->k", coeffs.conj(), matrices.m_y, coeffs))
    worst = float(np.max(np.abs(imag))) if imag.size else 0.0
    if worst > _IMAG_TOLERANCE:
        raise RuntimeError(f"dipole expectation has imaginary residue {worst:.3e}")
    values = -np.asarray(radius(law, times)) * expect_y
    return DipoleSeries(times=times, values=values)


def populations(state: CoefficientState) -> np.ndarray:
    """Mode populations p_n = |C_n|^2 (sums to the squared norm)."""
    return np.abs(state.c) ** 2


def energy_expectation(
    state: CoefficientState,
    basis: BasisSet,
    matrices: HamiltonianMatrices,
    law: BreathingLaw,
    Z: float,
) -> float:
    """Instantaneous energy <C| [diag(eps) + V(t)] / r0^2 |C>, real."""
    v = assemble_v(state.t, law, Z, matrices)
    r0 = float(radius(law, state.t))
    val = np.vdot(state.c, basis.energies * state.c + v @ state.c) / r0**2
    if abs(val.imag) > _IMAG_TOLERANCE:
        raise RuntimeError(f"energy expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)
