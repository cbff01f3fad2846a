"""Matrix elements of the coupling potential in the box eigenbasis.

The time-dependent coupling is

    V(t) = -Z r0(t) * <phi_m | 1/y | phi_n>  +  (1/2) r0(t)^3 rddot0(t) * <phi_m | y^2 | phi_n>,

so only three time-independent real symmetric matrices are ever needed:
1/y, y^2 (both entering V) and y (used by the dipole observable). They are
computed once per basis by Gauss-Legendre quadrature; V(t) assembly is then
two scalar-matrix multiplications per call.

The 1/y integrand is regular: phi_n(y) ~ y^{l+1} near the origin, so
phi_m phi_n / y ~ y^{2l+1} and plain Gauss-Legendre converges fast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, basis_matrix
from .boundary import BreathingLaw, quadratic_drive, radius
from .specialfn import gauss_legendre


@dataclass(frozen=True)
class HamiltonianMatrices:
    """Time-independent matrix elements <phi_m| f(y) |phi_n> at fixed l."""

    m_invy: np.ndarray   # f = 1/y
    m_y2: np.ndarray     # f = y^2
    m_y: np.ndarray      # f = y
    basis_l: int


def default_quadrature_order(basis: BasisSet) -> int:
    """Order large enough to resolve the fastest integrand oscillation.

    The product phi_m phi_n oscillates with total phase up to 2*lambda_max
    over (0, 1); Gauss-Legendre needs about half that many nodes, plus
    margin.
    """
    return max(64, int(np.ceil(basis.zeros[-1])) + 48)


def build_matrices(basis: BasisSet, order: int | None = None) -> HamiltonianMatrices:
    """Assemble the 1/y, y^2 and y matrices by Gauss-Legendre quadrature.

    With the default order, doubling it changes no entry by more than
    ~1e-13; entries are symmetrized to remove quadrature round-off skew.
    """
    if order is None:
        order = default_quadrature_order(basis)
    rule = gauss_legendre(order)
    y, w = rule.nodes, rule.weights
    phi = basis_matrix(basis, y)

    def gram(f_vals: np.ndarray) -> np.ndarray:
        m = (phi * (w * f_vals)) @ phi.T
        return (m + m.T) / 2.0

    return HamiltonianMatrices(
        m_invy=gram(1.0 / y),
        m_y2=gram(y**2),
        m_y=gram(y),
        basis_l=basis.l,
    )


def assemble_v(t: float, law: BreathingLaw, Z: float, matrices: HamiltonianMatrices) -> np.ndarray:
    """Coupling matrix V(t) = -Z r0(t) M_invy + (1/2) r0^3 rddot0 M_y2."""
    if Z < 0:
        raise ValueError("nuclear charge Z must be non-negative")
    r0 = float(radius(law, t))
    drive = float(quadratic_drive(law, t))
    return (-Z * r0) * matrices.m_invy + drive * matrices.m_y2


def dump_matrices(matrices: HamiltonianMatrices, path) -> None:
    """Write the three matrices to a text file (row-major, 17 significant digits)."""
    with open(path, "w") as fh:
        fh.write(f"# matrix elements in the box basis, l = {matrices.basis_l}\n")
        for name in ("m_invy", "m_y2", "m_y"):
            m = getattr(matrices, name)
            fh.write(f"# {name} ({m.shape[0]}x{m.shape[1]})\n")
            for row in m:
                fh.write(" ".join(f"{v:.16e}" for v in row) + "\n")
