"""Independent finite-difference propagation on a radial grid.

This solves the same physics as the spectral propagator but through the
other standard route: the fixed-domain Hermitian equation in the rescaled
time tau,

    i dPhi/dtau = [ -1/2 d^2/dy^2 + (1/2) r0^3 rddot0 y^2
                    + l(l+1)/(2 y^2) - Z r0 / y ] Phi,

discretized with second-order central differences on a uniform y-grid
(Dirichlet at both ends; the reduced function vanishes like y^{l+1} at the
origin, so the singular potentials are only ever evaluated at interior
nodes) and stepped with Crank-Nicolson, the potential taken at the step
midpoint. Crank-Nicolson is unconditionally norm-preserving, which makes
the grid run an independent cross-check of the spectral path: it shares no
basis, no quadrature and no time variable with it.

It is a correctness oracle, not a production path; it is allowed to be
slow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import eigh_tridiagonal, solve_banded

from .basis import BasisSet, basis_matrix, build_basis
from .boundary import BreathingLaw, TauMap, radius, radius_derivatives
from .observables import DipoleSeries
from .propagator import CoefficientState, SimulationConfig, diagonalize_static
from .hamiltonian import build_matrices

MIN_GRID_SIZE = 200
DEFAULT_STEPS = 20000


@dataclass(frozen=True)
class GridState:
    """Wave function sampled on the interior of a uniform y-grid."""

    y: np.ndarray        # interior nodes, y_i = i*h, i = 1..M
    values: np.ndarray   # complex Phi(y_i); Phi = 0 at y = 0 and y = 1
    tau: float
    t: float

    @property
    def spacing(self) -> float:
        return float(self.y[0])

    def norm_squared(self) -> float:
        """Trapezoid norm including the zero boundary values."""
        return float(self.spacing * np.sum(np.abs(self.values) ** 2))


def _initial_profile(config: SimulationConfig, y: np.ndarray) -> np.ndarray:
    """Sample the configured initial state on the grid and normalize it."""
    spec = config.initial
    if spec.kind == "box":
        modes = build_basis(config.l, spec.index)
        phi = basis_matrix(modes, y)[spec.index - 1].astype(complex)
    else:
        basis = build_basis(config.l, config.basis_size)
        matrices = build_matrices(basis)
        _, vecs = diagonalize_static(basis, matrices, config.Z, spec.r_ref)
        coeffs = vecs[:, spec.index - 1]
        phi = (coeffs @ basis_matrix(basis, y)).astype(complex)
    h = float(y[0])
    phi /= np.sqrt(h * np.sum(np.abs(phi) ** 2))
    return phi


def _static_potential_parts(config: SimulationConfig, y: np.ndarray):
    """Time-independent pieces: (y^2, 1/y scaled by -Z, centrifugal)."""
    coulomb = -config.Z / y
    centrifugal = config.l * (config.l + 1) / (2.0 * y**2) if config.l > 0 else 0.0
    return y**2, coulomb, centrifugal


def propagate_grid(
    config: SimulationConfig,
    m: int = 2000,
    dtau: float | None = None,
    return_final_state: bool = False,
):
    """Crank-Nicolson propagation in tau; returns the dipole series d(t_k)
    on the same uniform output grid as the spectral path.

    `m` is the number of interior grid points; `dtau` defaults to the total
    rescaled duration divided by DEFAULT_STEPS and is rounded so the last
    step lands exactly on tau(T). The caller is responsible for passing a
    dtau small enough that halving it no longer changes the result at the
    tolerance of interest. Dipole samples are computed at every step and
    interpolated onto the output grid.
    """
    if m < MIN_GRID_SIZE:
        raise ValueError(f"grid size m={m} too coarse; need at least {MIN_GRID_SIZE}")
    tau_map = TauMap(config.law, config.T)
    tau_total = tau_map.tau_max
    if dtau is None:
        n_steps = DEFAULT_STEPS
    else:
        if dtau <= 0:
            raise ValueError("dtau must be positive")
        n_steps = max(1, int(round(tau_total / dtau)))
    dtau = tau_total / n_steps

    h = 1.0 / (m + 1)
    y = np.arange(1, m + 1) * h
    phi = _initial_profile(config, y)

    taus = np.arange(n_steps + 1) * dtau
    t_steps = np.asarray(tau_map.t_at(taus), dtype=float)
    t_mids = np.asarray(tau_map.t_at(taus[:-1] + dtau / 2.0), dtype=float)

    kinetic_diag = 1.0 / h**2           # diagonal of -1/2 d2/dy2
    off = -0.5 / h**2                   # off-diagonal
    z = 0.5j * dtau
    y2, coulomb_over_r0, centrifugal = _static_potential_parts(config, y)

    dipoles = np.empty(n_steps + 1)
    r0_steps = np.asarray(radius(config.law, t_steps), dtype=float)
    r0_mids = np.asarray(radius(config.law, t_mids), dtype=float)
    _, rddot_mids = radius_derivatives(config.law, t_mids)
    banded = np.empty((3, m), dtype=complex)
    banded[0, 0] = 0.0
    banded[2, -1] = 0.0
    banded[0, 1:] = z * off
    banded[2, :-1] = z * off

    for j in range(n_steps + 1):
        dipoles[j] = -r0_steps[j] * h * np.sum(y * np.abs(phi) ** 2)
        if j == n_steps:
            break
        r0m = r0_mids[j]
        drive = 0.5 * r0m**3 * rddot_mids[j]
        h_diag = kinetic_diag + drive * y2 + r0m * coulomb_over_r0 + centrifugal
        rhs_v = (1.0 - z * h_diag) * phi
        rhs_v[:-1] -= z * off * phi[1:]
        rhs_v[1:] -= z * off * phi[:-1]
        banded[1, :] = 1.0 + z * h_diag
        phi = solve_banded((1, 1), banded, rhs_v)

    out_times = config.sample_times
    series = DipoleSeries(times=out_times, values=np.interp(out_times, t_steps, dipoles))
    if return_final_state:
        state = GridState(y=y, values=phi, tau=float(taus[-1]), t=float(t_steps[-1]))
        return series, state
    return series


def project_to_basis(state: GridState, basis: BasisSet) -> CoefficientState:
    """Expansion coefficients C_n = int phi_n(y) Phi(y) dy by the trapezoid rule.

    The boundary values are zero, so the integral reduces to h * sum over
    interior nodes. The completeness defect 1 - sum |C_n|^2 measures how
    much of the grid state lies outside the truncated basis.
    """
    phi_modes = basis_matrix(basis, state.y)
    coeffs = state.spacing * (phi_modes @ state.values)
    return CoefficientState(t=state.t, c=coeffs)


def static_ground_energy_grid(Z: float, r0: float, l: int, m: int = 4000) -> float:
    """Ground-state energy of the static confined atom from the grid operator.

    Diagonalizes the same tridiagonal Hamiltonian the Crank-Nicolson step
    uses, frozen at fixed radius, and rescales from tau-energy to physical
    energy (divide by r0^2). Second-order accurate in the grid spacing.
    """
    if r0 <= 0:
        raise ValueError("box radius r0 must be positive")
    h = 1.0 / (m + 1)
    y = np.arange(1, m + 1) * h
    pot = -Z * r0 / y
    if l > 0:
        pot = pot + l * (l + 1) / (2.0 * y**2)
    diag = 1.0 / h**2 + pot
    offdiag = np.full(m - 1, -0.5 / h**2)
    vals = eigh_tridiagonal(diag, offdiag, select="i", select_range=(0, 0))[0]
    return float(vals[0]) / r0**2


def grid_dipole_with_phase(state: GridState, law: BreathingLaw) -> float:
    """Dipole via explicit reconstruction of the physical wave function.

    Rebuilds R(r) = Phi(y) * exp(i/2 r0 rdot0 y^2) / (r0^{3/2} y) on the
    grid, then integrates -|R|^2 r^3 dr with Simpson's rule. Must agree
    with -r0 * int y |Phi|^2 dy: the gauge phase cancels in the modulus.
    Kept as an independent evaluation path for exactly that check.
    """
    r0 = float(radius(law, state.t))
    rdot, _ = radius_derivatives(law, state.t)
    phase = np.exp(0.5j * r0 * float(rdot) * state.y**2)
    r_wave = state.values * phase / (r0**1.5 * state.y)
    r = r0 * state.y
    integrand = np.abs(r_wave) ** 2 * r**3
    # Dirichlet ends contribute zero; include them to integrate over [0, r0].
    full_r = np.concatenate(([0.0], r, [r0]))
    full_f = np.concatenate(([0.0], integrand, [0.0]))
    return -float(simpson(full_f, x=full_r))
