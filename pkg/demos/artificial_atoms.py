"""Spectra of Cooper-pair boxes, transmons and fluxonium-type atoms.

Run with ``python demos/artificial_atoms.py``.
"""

import math

import numpy as np

from quantcirc.atoms import (
    AtomSpec,
    array_reduce,
    classify_regime,
    hamiltonian,
    sensitivity,
    spectrum,
    squid_reduce,
    transition_frequency,
)
from quantcirc.constants import h, phi0

EC = h * 1e9  # work in units of a 1 GHz charging energy


def ghz(energy):
    return energy / h / 1e9


print("E_J/E_C   f01 (GHz)   charge dispersion (MHz)   family")
for ratio in (0.1, 1.0, 5.0, 10.0, 20.0, 50.0):
    at_0 = AtomSpec(EC, ratio * EC, n_g=0.0)
    at_half = AtomSpec(EC, ratio * EC, n_g=0.5)
    f0 = transition_frequency(at_0) / (2 * math.pi)
    spread = abs(transition_frequency(at_half) - transition_frequency(at_0)) / (2 * math.pi)
    print(f"{ratio:7.1f}   {f0 / 1e9:9.4f}   {spread / 1e6:22.4f}   {classify_regime(at_0).label}")

transmon = AtomSpec(EC, 50 * EC)
print("\ntransmon f01 vs sqrt(8 E_J E_C) - E_C:",
      f"{transition_frequency(transmon) / 2 / math.pi / 1e9:.4f} GHz vs "
      f"{(math.sqrt(8 * 50) - 1):.4f} GHz")

# Fluxonium: E_J = 4 E_C, E_L = E_C, swept over one flux quantum.
print("\nfluxonium levels (GHz) and d f01 / d phi_ext (GHz per rad)")
for phi_ext in np.linspace(0, 2 * math.pi, 9):
    spec = AtomSpec(EC, 4 * EC, EC, phi_ext=phi_ext)
    levels = ghz(spectrum(hamiltonian(spec), 3))
    slope = sensitivity(spec, "phi_ext") / (2 * math.pi) / 1e9
    print(f"  phi_ext = {phi_ext:5.3f}:  {np.round(levels - levels[0], 4)}   slope {slope:+.3e}")

# A DC SQUID behaves as one tunable junction.
print("\nasymmetric SQUID (E_J1 = 5 GHz, E_J2 = 7.5 GHz)")
for frac in (0.0, 0.25, 0.5):
    red = squid_reduce(h * 5e9, h * 7.5e9, frac * 2 * math.pi * phi0)
    print(f"  Phi_ext = {frac:.2f} Phi_0: E_J,eff = {ghz(red.ej_eff):.4f} GHz, offset {red.phase_offset:+.4f}")

# A long junction array is a linear superinductance.
arr = array_reduce(h * 20e9, 100, ec=h * 0.5e9)
print(f"\n100-junction array: L_eff = {arr.l_eff * 1e9:.1f} nH, phase-slip factor {arr.phase_slip_factor:.1e}")
