"""Kinematics of the breathing wall.

The box radius follows r0(t) = a + b*cos(omega0*t). This module provides
the trajectory and its derivatives, the quadratic drive strength
(1/2) r0^3 rddot0 that appears in the transformed Hamiltonian, its exact
decomposition into a constant plus four harmonics of omega0, and the
rescaled time

    tau(t) = int_0^t ds / r0(s)^2

together with its inverse. tau is the natural evolution parameter of the
fixed-domain form of the problem (used by the grid oracle); the spectral
propagator integrates in physical time and never needs it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq


@dataclass(frozen=True)
class BreathingLaw:
    """Harmonic wall trajectory r0(t) = a + b*cos(omega0*t), atomic units."""

    a: float
    b: float
    omega0: float

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("mean radius a must be positive")
        if self.b < 0:
            raise ValueError("oscillation amplitude b must be non-negative")
        if self.a - self.b <= 0:
            raise ValueError(
                f"wall radius non-positive: a - b = {self.a - self.b} (need a > b)"
            )
        if self.omega0 <= 0:
            raise ValueError("drive frequency omega0 must be positive")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega0


def radius(law: BreathingLaw, t) -> float:
    """Wall radius r0(t) = a + b*cos(omega0*t); accepts scalar or ndarray t."""
    return law.a + law.b * np.cos(law.omega0 * np.asarray(t, dtype=float))


def radius_derivatives(law: BreathingLaw, t):
    """First and second time derivatives (rdot0, rddot0) of the wall radius."""
    t = np.asarray(t, dtype=float)
    rdot = -law.b * law.omega0 * np.sin(law.omega0 * t)
    rddot = -law.b * law.omega0**2 * np.cos(law.omega0 * t)
    return rdot, rddot


def quadratic_drive(law: BreathingLaw, t):
    """Drive strength (1/2) r0(t)^3 rddot0(t) of the y^2 potential term."""
    r0 = radius(law, t)
    _, rddot = radius_derivatives(law, t)
    return 0.5 * r0**3 * rddot


@dataclass(frozen=True)
class MultichromaticCoefficients:
    """Harmonic content of the quadratic drive:

    (1/2) r0^3 rddot0 = (1/2) (A + B cos w0 t + C cos 2w0 t
                               + D cos 3w0 t + E cos 4w0 t).
    """

    A: float
    B: float
    C: float
    D: float
    E: float

    def drive(self, law: BreathingLaw, t):
        """Evaluate the five-term expansion of (1/2) r0^3 rddot0 at t."""
        w0t = law.omega0 * np.asarray(t, dtype=float)
        return 0.5 * (
            self.A
            + self.B * np.cos(w0t)
            + self.C * np.cos(2 * w0t)
            + self.D * np.cos(3 * w0t)
            + self.E * np.cos(4 * w0t)
        )


def multichromatic_coefficients(law: BreathingLaw) -> MultichromaticCoefficients:
    """Exact expansion coefficients of r0^3 rddot0 over {1, cos k w0 t}.

    Obtained by expanding -b w0^2 cos(w0 t) (a + b cos(w0 t))^3 with the
    power-reduction identities for cos^2, cos^3, cos^4. The cos(w0 t)
    coefficient is -(a b w0^2 / 4)(4 a^2 + 9 b^2); all five satisfy the
    pointwise identity checked by `MultichromaticCoefficients.drive`.
    """
    a, b, w0 = law.a, law.b, law.omega0
    w2 = w0 * w0
    return MultichromaticCoefficients(
        A=-(3.0 * b * b * w2 / 8.0) * (4.0 * a * a + b * b),
        B=-(a * b * w2 / 4.0) * (4.0 * a * a + 9.0 * b * b),
        C=-(b * b * w2 / 2.0) * (3.0 * a * a + b * b),
        D=-(3.0 * a * b**3 * w2 / 4.0),
        E=-(b**4 * w2 / 8.0),
    )


def _inv_r0_squared(law: BreathingLaw, s: float) -> float:
    return float(radius(law, s)) ** -2


def tau_of_t(law: BreathingLaw, t: float) -> float:
    """Rescaled time tau(t) = int_0^t ds / r0(s)^2, by adaptive quadrature.

    The integrand is periodic, so whole periods are summed in closed count
    and only the remainder is integrated; absolute accuracy ~1e-12.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    period = law.period
    n_per, rem = divmod(t, period)
    total = 0.0
    if n_per >= 1:
        per_integral = quad(
            lambda s: _inv_r0_squared(law, s), 0.0, period, epsabs=1e-13, epsrel=1e-13, limit=500
        )[0]
        total += n_per * per_integral
    if rem > 0:
        total += quad(
            lambda s: _inv_r0_squared(law, s), 0.0, rem, epsabs=1e-13, epsrel=1e-13, limit=500
        )[0]
    return total


def t_of_tau(law: BreathingLaw, tau: float) -> float:
    """Invert the strictly increasing map t -> tau(t) by bracketed root finding.

    Since (a-b)^-2 >= dtau/dt >= (a+b)^-2, the root is bracketed by
    tau*(a-b)^2 and tau*(a+b)^2.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0:
        return 0.0
    lo = tau * (law.a - law.b) ** 2
    hi = tau * (law.a + law.b) ** 2
    return float(brentq(lambda t: tau_of_t(law, t) - tau, lo * 0.999999, hi * 1.000001, xtol=1e-12))


class TauMap:
    """Dense, vector-capable inverse map tau -> t on [0, tau_of_t(t_max)].

    Built once per propagation by integrating dt/dtau = r0(t)^2 with a
    high-order method and dense output; the endpoint is verified against
    the quadrature-based forward map. Grid propagation in tau needs this
    inversion at every step midpoint, where per-call root finding would be
    prohibitively slow.
    """

    def __init__(self, law: BreathingLaw, t_max: float):
        if t_max <= 0:
            raise ValueError("t_max must be positive")
        self.law = law
        self.t_max = t_max
        self.tau_max = tau_of_t(law, t_max)
        sol = solve_ivp(
            lambda tau, t: radius(law, t[0]) ** 2,
            (0.0, self.tau_max),
            [0.0],
            method="DOP853",
            rtol=1e-12,
            atol=1e-12,
            dense_output=True,
        )
        if not sol.success:
            raise RuntimeError(f"tau -> t inversion failed: {sol.message}")
        endpoint = sol.sol(self.tau_max)[0]
        if abs(endpoint - t_max) > 1e-8 * max(1.0, t_max):
            raise RuntimeError(
                f"tau -> t inversion inconsistent: t(tau_max) = {endpoint!r}, expected {t_max!r}"
            )
        self._dense = sol.sol

    def t_at(self, tau):
        """Physical time(s) t for tau value(s) in [0, tau_max]."""
        tau = np.asarray(tau, dtype=float)
        if np.any(tau < -1e-15) or np.any(tau > self.tau_max * (1 + 1e-12) + 1e-15):
            raise ValueError("tau outside [0, tau_max]")
        return self._dense(np.clip(tau, 0.0, self.tau_max))[0]
