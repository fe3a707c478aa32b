"""Quantum fluctuations of an LC oscillator damped by a resistor.

The closed-form variances are compared with direct integration of the
fluctuation-dissipation spectrum, and their low-temperature behaviour with
the logarithmic laws.  Run with ``python demos/damped_oscillator_fluctuations.py``.
"""

import cmath
import math

import numpy as np

from quantcirc.bath import damped_lc_variance_closed, damped_lc_variance_quadrature
from quantcirc.constants import hbar, k_B

L, C = 1e-9, 10e-12
W0 = 1 / math.sqrt(L * C)
Z0 = math.sqrt(L / C)


def circuit(kappa, theta, wc_ratio):
    R = 1 / (2 * kappa * C * W0)
    return L, C, R, wc_ratio * W0, theta * hbar * W0 / k_B


print("reduced variances <Phi^2>/(hbar Z0) and Z0 <Q^2>/hbar with w_c = 10 w0")
print(" kappa  theta    phi (closed)   phi (quad)    q (closed)    q (quad)")
for kappa in (0.3, 2.0, 5.0, 50.0):
    for theta in (0.0, 0.1, 1.0):
        args = circuit(kappa, theta, 10.0)
        pc, qc, _ = damped_lc_variance_closed(*args)
        pq, qq = damped_lc_variance_quadrature(*args)
        print(f"{kappa:6.1f} {theta:6.2f}  {pc / (hbar * Z0):12.6f} {pq / (hbar * Z0):12.6f}"
              f"  {qc * Z0 / hbar:12.6f} {qq * Z0 / hbar:12.6f}")

print("\nzero temperature, wide band: flux variance against the logarithmic law")
for kappa in (0.3, 2.0, 5.0, 50.0):
    s = cmath.sqrt(kappa * kappa - 1)
    law = (cmath.log(kappa + s) / (math.pi * s)).real
    phi2, _, _ = damped_lc_variance_closed(*circuit(kappa, 0.0, 1e6))
    print(f"  kappa = {kappa:5.1f}: {phi2 / (hbar * Z0):.8f} vs {law:.8f}")

print("\ncharge variance grows as (4 kappa / pi) ln(w_c / w0) in units of hbar / 2 Z0")
for kappa in (0.1, 0.3, 1.0):
    grid = np.array([1e3, 1e4, 1e5])
    q = [damped_lc_variance_closed(*circuit(kappa, 0.0, wc))[1] / (hbar / (2 * Z0)) for wc in grid]
    slope = np.polyfit(np.log(grid), q, 1)[0]
    print(f"  kappa = {kappa:3.1f}: slope {slope:.5f} vs {4 * kappa / math.pi:.5f}")

print("\nthe large-cutoff digamma form drifts from the exact Drude result at small w_c")
for wc in (10.0, 100.0, 1000.0):
    exact = damped_lc_variance_closed(*circuit(0.3, 0.1, wc))
    approx = damped_lc_variance_closed(*circuit(0.3, 0.1, wc), form="large_cutoff")
    print(f"  w_c / w0 = {wc:6.0f}: flux {approx[0] / exact[0] - 1:+.2e}, charge {approx[1] / exact[1] - 1:+.2e}")
