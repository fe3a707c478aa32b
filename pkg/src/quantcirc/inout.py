"""Driven, damped linear oscillator in the rotating-wave approximation.

The intracavity field obeys da/dt = -i w_a a - (gamma_a/2) a + sqrt(gamma_a) a_in
and the outgoing field follows from sqrt(gamma_a) a = a_in - zeta a_out.
Everything below is in the frame rotating at the drive frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import hbar, k_B

__all__ = [
    "PARALLEL",
    "SERIES",
    "CavityParams",
    "DriveSpec",
    "damping_rate",
    "input_output",
    "steady_state",
    "thermal_occupation",
    "transient",
]

SERIES = +1
PARALLEL = -1

#: largest gamma_a / omega_a accepted as weak damping
RWA_LIMIT = 0.1


@dataclass(frozen=True)
class CavityParams:
    """Single-port cavity: frequency (rad/s), energy decay rate (1/s),
    coupling type ``zeta`` (+1 series, -1 parallel) and impedance (ohm)."""

    omega_a: float
    gamma_a: float
    zeta: int = PARALLEL
    z_a: float = 50.0

    def __post_init__(self):
        if self.zeta not in (SERIES, PARALLEL):
            raise ValueError("zeta must be +1 (series) or -1 (parallel)")
        if not self.gamma_a > 0 or not self.omega_a > 0:
            raise ValueError("omega_a and gamma_a must be positive")
        if self.gamma_a / self.omega_a >= RWA_LIMIT:
            raise ValueError(
                f"gamma_a/omega_a = {self.gamma_a / self.omega_a:.3g} is too large for the rotating-wave treatment"
            )

    @property
    def quality_factor(self) -> float:
        return self.omega_a / self.gamma_a


@dataclass(frozen=True)
class DriveSpec:
    """Coherent input: amplitude in sqrt(photons/s), drive frequency (rad/s)
    and the thermal photon number of the input line."""

    amplitude: complex
    omega_d: float
    thermal_n: float = 0.0

    def __post_init__(self):
        if self.thermal_n < 0:
            raise ValueError("thermal photon number must be nonnegative")


def steady_state(cavity: CavityParams, drive: DriveSpec) -> complex:
    """<a> = sqrt(gamma) b_in / (i (w_a - w_d) + gamma / 2)."""
    return complex(
        math.sqrt(cavity.gamma_a) * drive.amplitude / (1j * (cavity.omega_a - drive.omega_d) + cavity.gamma_a / 2)
    )


def input_output(a_in, a, cavity: CavityParams):
    """Outgoing amplitude a_out = zeta (a_in - sqrt(gamma) a)."""
    return cavity.zeta * (np.asarray(a_in) - math.sqrt(cavity.gamma_a) * np.asarray(a))


def transient(cavity: CavityParams, drive: DriveSpec, a0: complex, t_grid) -> np.ndarray:
    """Exact solution of the linear Langevin equation for the mean field.

    <a>(t) = a_ss + (a0 - a_ss) exp(-(i (w_a - w_d) + gamma/2) t).
    """
    t = np.asarray(t_grid, dtype=float)
    a_ss = steady_state(cavity, drive)
    rate = 1j * (cavity.omega_a - drive.omega_d) + cavity.gamma_a / 2
    return a_ss + (a0 - a_ss) * np.exp(-rate * t)


def thermal_occupation(omega, T: float):
    """Bose occupation 1/(exp(hbar w / k_B T) - 1), defined for w != 0.

    Negative frequencies obey N(-w) = -N(w) - 1.  At T = 0 the result is 0
    for w > 0 and -1 for w < 0.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w == 0):
        raise ValueError("thermal occupation has a pole at omega = 0")
    if T < 0:
        raise ValueError("temperature must be nonnegative")
    if T == 0:
        return np.where(w > 0, 0.0, -1.0)[()]
    with np.errstate(over="ignore"):  # deep quantum limit: exp overflows to the correct 0
        return (1.0 / np.expm1(hbar * w / (k_B * T)))[()]


def damping_rate(omega_a: float, z_a: float, R: float, zeta: int = PARALLEL) -> float:
    """Energy decay rate of an oscillator of impedance z_a loaded by R.

    Parallel loading (zeta = -1) gives gamma = omega_a z_a / R; series
    loading (zeta = +1) gives gamma = omega_a R / z_a.  The loaded quality
    factor is omega_a / gamma.
    """
    if zeta == PARALLEL:
        return omega_a * z_a / R
    if zeta == SERIES:
        return omega_a * R / z_a
    raise ValueError("zeta must be +1 or -1")
