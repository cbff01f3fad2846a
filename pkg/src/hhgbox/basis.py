"""Orthonormal eigenbasis of the unit-radius spherical box at fixed
angular momentum l.

The basis functions are the reduced radial modes

    phi_n(y) = N_n * y * j_l(lambda_n * y),    y in [0, 1],

where lambda_n is the n-th positive zero of j_l (so phi_n(1) = 0) and N_n
normalizes int_0^1 phi_n^2 dy = 1. Each phi_n solves

    -1/2 phi'' + l(l+1)/(2 y^2) phi = eps_n phi,   eps_n = lambda_n^2 / 2.

Because the Hamiltonian of the breathing-box problem is purely radial, l
is conserved and a simulation uses exactly one such block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specialfn import LMAX, bessel_zeros, spherical_bessel_j


@dataclass(frozen=True)
class BasisSet:
    """Box eigenbasis at fixed l: zeros, energies and normalizations."""

    l: int
    size: int
    zeros: np.ndarray      # lambda_n, n = 1..size
    energies: np.ndarray   # eps_n = lambda_n^2 / 2, strictly increasing
    norms: np.ndarray      # N_n > 0


def build_basis(l: int, size: int) -> BasisSet:
    """Construct the first `size` box modes for angular momentum l.

    The normalization uses the closed form int_0^1 y^2 j_l(lambda y)^2 dy
    = j_{l+1}(lambda)^2 / 2, valid when j_l(lambda) = 0, which is exact to
    machine precision (no quadrature involved).
    """
    if size < 1:
        raise ValueError("basis size must be >= 1")
    if l < 0 or l > LMAX - 1:
        raise ValueError(f"angular momentum l={l} outside supported range 0..{LMAX - 1}")
    zeros = bessel_zeros(l, size)
    energies = zeros**2 / 2.0
    norms = np.sqrt(2.0) / np.abs(spherical_bessel_j(l + 1, zeros))
    return BasisSet(l=l, size=size, zeros=zeros, energies=energies, norms=norms)


def eval_basis(basis: BasisSet, n: int, y: float) -> float:
    """Value of phi_n at a single point y in [0, 1] (n is 1-based)."""
    if not 1 <= n <= basis.size:
        raise ValueError(f"mode index n={n} outside 1..{basis.size}")
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y={y} outside [0, 1]")
    lam = basis.zeros[n - 1]
    return basis.norms[n - 1] * y * spherical_bessel_j(basis.l, lam * y)


def basis_matrix(basis: BasisSet, y: np.ndarray) -> np.ndarray:
    """All basis functions sampled on a grid: returns shape (size, len(y)).

    Vectorized over both mode index and grid point; used for matrix-element
    assembly and for synthesizing wave functions on grids.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0) or np.any(y > 1.0):
        raise ValueError("grid points must lie in [0, 1]")
    arg = np.outer(basis.zeros, y)
    jl = np.empty_like(arg)
    for i in range(basis.size):
        jl[i] = spherical_bessel_j(basis.l, arg[i])
    return basis.norms[:, None] * y[None, :] * jl
