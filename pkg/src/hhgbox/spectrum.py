"""Power spectrum of the dipole moment and harmonic-peak extraction.

The spectrum is the absolute square of the finite-time Fourier transform

    |d(omega)|^2 = | (1/T) int_0^T exp(-i omega t) d(t) dt |^2,

evaluated by the trapezoid rule directly on a requested frequency grid
(not on FFT bins), so integer multiples of the drive frequency land
exactly on evaluation points regardless of the sample count. No window is
applied by default; an optional Hann window is available for leakage
inspection (it rescales absolute magnitudes and is not part of the plain
definition above).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observables import CSV_UNITS_HEADER, DipoleSeries

DEFAULT_MAX_HARMONIC = 30
DEFAULT_POINTS_PER_HARMONIC = 20


@dataclass(frozen=True)
class PowerSpectrum:
    """|d(omega)|^2 on a strictly increasing frequency grid."""

    omegas: np.ndarray
    values: np.ndarray
    interaction_time: float

    def to_csv(self, path, include_log10: bool = False) -> None:
        with open(path, "w") as fh:
            fh.write(CSV_UNITS_HEADER + "\n")
            fh.write("omega,power" + (",log10_power\n" if include_log10 else "\n"))
            for w, p in zip(self.omegas, self.values):
                row = f"{w:.17g},{p:.17g}"
                if include_log10:
                    row += f",{np.log10(p) if p > 0 else -np.inf:.17g}"
                fh.write(row + "\n")


def default_omega_grid(
    omega0: float,
    max_harmonic: int = DEFAULT_MAX_HARMONIC,
    points_per_harmonic: int = DEFAULT_POINTS_PER_HARMONIC,
) -> np.ndarray:
    """Frequencies 0 .. max_harmonic*omega0 in steps of omega0/points_per_harmonic."""
    n = max_harmonic * points_per_harmonic
    return np.arange(n + 1) * (omega0 / points_per_harmonic)


def _hann(n: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / (n - 1)))


def power_spectrum(
    series: DipoleSeries,
    omegas: np.ndarray,
    window: str | None = None,
) -> PowerSpectrum:
    """Evaluate |d(omega)|^2 on the given frequency grid.

    Requires a uniform time grid with at least 2 samples per period of the
    largest requested frequency; violating that raises with the maximum
    safe frequency named.
    """
    t = series.times
    if t.size < 2:
        raise ValueError("need at least 2 time samples")
    dt = t[1] - t[0]
    if not np.allclose(np.diff(t), dt, rtol=0, atol=1e-9 * max(dt, 1e-300)):
        raise ValueError("time grid must be uniform")
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or omegas.size == 0 or np.any(np.diff(omegas) <= 0):
        raise ValueError("frequency grid must be non-empty and strictly increasing")
    omega_safe = np.pi / dt
    if omegas[-1] > omega_safe * (1 + 1e-12):
        raise ValueError(
            f"requested omega {omegas[-1]:.6g} violates the 2-samples-per-period guard; "
            f"max safe omega for this grid is {omega_safe:.6g}"
        )

    d = series.values
    if window is not None:
        if window != "hann":
            raise ValueError(f"unknown window {window!r}; supported: 'hann'")
        d = d * _hann(d.size)

    big_t = t[-1] - t[0]
    weights = np.full(t.size, dt)
    weights[0] = weights[-1] = dt / 2.0
    transform = np.exp(-1j * np.outer(omegas, t)) @ (weights * d) / big_t
    return PowerSpectrum(
        omegas=omegas, values=np.abs(transform) ** 2, interaction_time=float(big_t)
    )


def harmonic_peaks(
    spectrum: PowerSpectrum, omega0: float, k_max: int
) -> list[tuple[int, float]]:
    """Spectrum values at the harmonic comb omega = k*omega0, k = 1..k_max.

    Each harmonic is read off at the nearest grid point; with the default
    grid the multiples of omega0 are exact grid points. Raises if the grid
    does not cover k_max*omega0.
    """
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    step = np.min(np.diff(spectrum.omegas)) if spectrum.omegas.size > 1 else 0.0
    if k_max * omega0 > spectrum.omegas[-1] + step / 2 + 1e-12:
        raise ValueError(
            f"spectrum covers omega <= {spectrum.omegas[-1]:.6g}, "
            f"cannot extract harmonic {k_max} at {k_max * omega0:.6g}"
        )
    peaks = []
    for k in range(1, k_max + 1):
        idx = int(np.argmin(np.abs(spectrum.omegas - k * omega0)))
        peaks.append((k, float(spectrum.values[idx])))
    return peaks


def harmonics_to_csv(peaks: list[tuple[int, float]], path) -> None:
    """Write (harmonic_order, power) rows, 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(CSV_UNITS_HEADER + "\n")
        fh.write("harmonic_order,power\n")
        for k, p in peaks:
            fh.write(f"{k},{p:.17g}\n")
