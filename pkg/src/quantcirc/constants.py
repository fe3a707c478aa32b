"""Physical constants in SI units."""

from scipy.constants import e, h, hbar, k as k_B

#: reduced flux quantum hbar / 2e (Wb)
phi0 = hbar / (2 * e)
#: flux quantum h / 2e (Wb)
Phi0 = h / (2 * e)
#: resistance quantum h / (2e)^2 (Ohm)
R_Q = h / (2 * e) ** 2

__all__ = ["e", "h", "hbar", "k_B", "phi0", "Phi0", "R_Q"]
