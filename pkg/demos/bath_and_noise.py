"""Caldeira-Leggett discretization of a resistor and its noise spectra.

Run with ``python demos/bath_and_noise.py``.
"""

import math

import numpy as np

from quantcirc.bath import (
    OhmicAdmittance,
    attach_bath,
    discretize,
    johnson_voltage_psd,
    quantum_psd,
    reconstruct,
)
from quantcirc.constants import hbar, k_B
from quantcirc.hamlag import build_matrices, normal_modes
from quantcirc.netlist import parse_netlist

resistor = OhmicAdmittance(50.0, omega_c=2e11)
bath = discretize(resistor, delta_omega=1e8, omega_max=4e10)
print(f"{len(bath)} oscillators; series inductances span "
      f"{min(o.l for o in bath.oscillators):.3e} .. {max(o.l for o in bath.oscillators):.3e} H")

omega = np.linspace(5e9, 3e10, 6)
rec = reconstruct(bath, omega, eta=2e8)
for w, y in zip(omega, rec):
    print(f"  w = {w:.2e} rad/s: Re Y comb {y.real * 1e3:.4f} mS, target {resistor(w).real * 1e3:.4f} mS")

# Loading an LC resonator with a sparse comb: one mode stays near w0.
lc = parse_netlist("C1 1 0 10p\nL1 1 0 1n\n")
loaded = attach_bath(lc, discretize(OhmicAdmittance(1e4), 1e9, 2e10), "1")
modes = normal_modes(build_matrices(loaded))
print(f"\nLC plus {len(loaded.nodes) - 2} bath nodes: mode nearest 1e10 rad/s at "
      f"{modes.frequencies[np.argmin(np.abs(modes.frequencies - 1e10))]:.4e} rad/s")

print(f"\nJohnson noise of 50 ohm at 300 K: {johnson_voltage_psd(OhmicAdmittance(50.0), 300.0, 1e9):.4e} V^2/(rad/s)")

T = 0.05
print(f"\nquantum voltage noise at T = {T} K (emission w > 0, absorption w < 0)")
for x in (-5.0, -1.0, -0.1, 0.1, 1.0, 5.0):
    w = x * k_B * T / hbar
    _, s_vv = quantum_psd(OhmicAdmittance(50.0), T, w)
    print(f"  hbar w / k_B T = {x:+5.1f}: S_VV = {s_vv:.4e}")
print("detailed balance S(-w) / S(w) at hbar w = k_B T:",
      quantum_psd(OhmicAdmittance(50.0), T, -k_B * T / hbar)[1] / quantum_psd(OhmicAdmittance(50.0), T, k_B * T / hbar)[1],
      "vs", math.exp(-1))
