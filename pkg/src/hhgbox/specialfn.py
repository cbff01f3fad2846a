"""Spherical Bessel functions, their positive zeros, and Gauss-Legendre
quadrature on (0, 1).

These are the numerical bedrock for the box eigenbasis: the radial modes
are y * j_l(lambda y) with lambda a zero of j_l, and every matrix element
is a one-dimensional integral over (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import spherical_jn

# Highest angular momentum the zero tables are built for. The interlacing
# construction needs all rows l' < l, so the cap keeps table growth bounded.
LMAX = 50


def spherical_bessel_j(l: int, x):
    """Spherical Bessel function j_l(x) for integer l >= 0 and x >= 0.

    Accepts a scalar or an ndarray for x. The x -> 0 limit is exact
    (1 for l = 0, 0 otherwise).
    """
    if l < 0 or l > LMAX:
        raise ValueError(f"angular momentum l={l} outside supported range 0..{LMAX}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0) or not np.all(np.isfinite(x_arr)):
        raise ValueError("argument x must be finite and non-negative")
    result = spherical_jn(l, x_arr)
    if np.isscalar(x) or x_arr.ndim == 0:
        return float(result)
    return result


@lru_cache(maxsize=None)
def _zeros_row(l: int, count: int) -> tuple[float, ...]:
    """First `count` positive zeros of j_l, found by interlacing.

    Zeros of j_0 are n*pi exactly; each zero of j_l lies strictly between
    consecutive zeros of j_{l-1}, so bracketed root finding cannot skip
    or duplicate a zero.
    """
    if l == 0:
        return tuple(np.arange(1, count + 1) * np.pi)
    prev = _zeros_row(l - 1, count + 1)
    roots = []
    for lo, hi in zip(prev[:-1], prev[1:]):
        roots.append(brentq(lambda x: spherical_jn(l, x), lo, hi, xtol=1e-13, rtol=8.9e-16))
    return tuple(roots)


def bessel_zeros(l: int, count: int) -> np.ndarray:
    """First `count` positive zeros of j_l, strictly increasing."""
    if l < 0 or l > LMAX:
        raise ValueError(f"angular momentum l={l} outside supported range 0..{LMAX}")
    if count < 1:
        raise ValueError("count must be >= 1")
    return np.array(_zeros_row(l, count))


def bessel_zero(l: int, n: int) -> float:
    """n-th positive zero of j_l (n is 1-based)."""
    if n < 1:
        raise ValueError("zero index n must be >= 1")
    return float(bessel_zeros(l, n)[n - 1])


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integration over the open interval (0, 1)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f) -> float:
        """Integral of f over (0, 1); f must accept an ndarray of nodes."""
        return float(np.dot(self.weights, f(self.nodes)))


def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule with `order` nodes, mapped from (-1, 1) to (0, 1).

    Exact for polynomials of degree <= 2*order - 1.
    """
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    x, w = leggauss(order)
    return QuadratureRule(nodes=(x + 1.0) / 2.0, weights=w / 2.0, order=order)
