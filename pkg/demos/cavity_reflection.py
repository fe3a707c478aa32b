"""A driven single-port cavity in the rotating frame.

Run with ``python demos/cavity_reflection.py``.
"""

import math

import numpy as np

from quantcirc.inout import (
    PARALLEL,
    SERIES,
    CavityParams,
    DriveSpec,
    damping_rate,
    input_output,
    steady_state,
    thermal_occupation,
    transient,
)

# Loaded quality factor of the 10 ohm resonator across 100 ohm.
w0 = 1 / math.sqrt(1e-9 * 10e-12)
print(f"Q with parallel 100 ohm load: {w0 / damping_rate(w0, 10.0, 100.0, PARALLEL):.3f}")
print(f"Q with series 1 ohm load:     {w0 / damping_rate(w0, 10.0, 1.0, SERIES):.3f}")

cav = CavityParams(omega_a=2 * math.pi * 6e9, gamma_a=2 * math.pi * 1e6)
b_in = 1.0
print("\ndetuning/gamma   |<a>|^2 (photons)   arg(a_out/a_in) (rad)")
for x in np.linspace(-3, 3, 7):
    drive = DriveSpec(b_in, cav.omega_a - x * cav.gamma_a)
    a = steady_state(cav, drive)
    a_out = complex(input_output(b_in, a, cav))
    print(f"{x:+15.1f}   {abs(a) ** 2:17.4e}   {np.angle(a_out / b_in):+.4f}  (|a_out| = {abs(a_out):.12f})")

drive = DriveSpec(b_in, cav.omega_a)
t = np.array([0, 1, 2, 5, 10]) / cav.gamma_a
ring_up = transient(cav, drive, 0.0, t)
print("\nring-up from vacuum: |<a>| / |a_ss| =", np.round(np.abs(ring_up) / abs(steady_state(cav, drive)), 4))
print(f"thermal photons at 6 GHz, 50 mK: {thermal_occupation(cav.omega_a, 0.05):.3e}")
