"""Dissipative environments: Caldeira-Leggett combs, fluctuation spectra and
the quantum variances of a resistively damped LC oscillator.

Sign conventions follow the engineering ``j = -i``: an inductor has
admittance ``1/(j L w) = i/(L w)`` and a capacitor ``j C w = -i C w``.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from .constants import hbar, k_B
from .netlist import CAPACITOR, INDUCTOR, Branch, CircuitGraph

__all__ = [
    "AdmittanceModel",
    "BathDiscretization",
    "BathOscillator",
    "CallableAdmittance",
    "ConvergenceError",
    "DampedLCParams",
    "InductorAdmittance",
    "OhmicAdmittance",
    "ParallelAdmittance",
    "PassivityError",
    "TabulatedAdmittance",
    "attach_bath",
    "damped_lc_variance_closed",
    "damped_lc_variance_quadrature",
    "digamma",
    "discretize",
    "johnson_voltage_psd",
    "nyquist_current_psd",
    "polygamma",
    "quantum_psd",
    "read_admittance_csv",
    "reconstruct",
    "write_bath_csv",
    "write_psd_csv",
]

J = -1j  # engineering imaginary unit


class PassivityError(ValueError):
    """An admittance with negative real part was supplied."""


class ConvergenceError(ArithmeticError):
    """A numerical procedure did not reach its tolerance."""


# ---------------------------------------------------------------------------
# digamma and polygamma

# B_2, B_4, ..., B_16
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

_SHIFT_TO = 10.0


def _is_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _digamma_scalar(z: complex) -> complex:
    if _is_pole(z):
        raise ValueError(f"digamma has a pole at {z.real:g}")
    acc = 0.0 + 0.0j
    while z.real < _SHIFT_TO:
        acc -= 1.0 / z
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv  # not 1/z^2, which overflows for huge |z|
    series = 0.0 + 0.0j
    power = inv2
    for k, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * k) * power
        power *= inv2
    return acc + cmath.log(z) - 0.5 * inv - series


def _polygamma_scalar(n: int, z: complex) -> complex:
    if _is_pole(z):
        raise ValueError(f"polygamma has a pole at {z.real:g}")
    fact_n = math.factorial(n)
    sign = -1.0 if n % 2 else 1.0  # (-1)**n
    acc = 0.0 + 0.0j
    while z.real < _SHIFT_TO:
        # psi_n(z) = psi_n(z + 1) - (-1)^n n! / z^(n+1)
        acc -= sign * fact_n / z ** (n + 1)
        z += 1.0
    inv = 1.0 / z
    inv_n = inv**n
    total = math.factorial(n - 1) * inv_n + fact_n / 2 * inv_n * inv
    power = inv_n
    for k, b in enumerate(_BERNOULLI, start=1):
        power *= inv * inv
        total += b * math.factorial(2 * k + n - 1) / math.factorial(2 * k) * power
    return acc - sign * total


def _apply(fun, x):
    arr = np.asarray(x)
    is_complex = np.iscomplexobj(arr)
    out = np.array([fun(complex(v)) for v in arr.ravel()], dtype=complex).reshape(arr.shape)
    if not is_complex:
        out = out.real
    return out.item() if out.ndim == 0 else out


def digamma(x):
    """Logarithmic derivative of the gamma function, psi(x) = Gamma'(x)/Gamma(x).

    Accepts real or complex scalars and arrays.  The argument is shifted
    upward with psi(z) = psi(z+1) - 1/z until Re z >= 10, where the
    asymptotic Bernoulli series is accurate to about 1e-15.

    Raises
    ------
    ValueError
        At the poles z = 0, -1, -2, ...
    """
    return _apply(_digamma_scalar, x)


def polygamma(n: int, x):
    """n-th derivative of :func:`digamma` for n >= 1 (n = 0 is digamma)."""
    if n == 0:
        return digamma(x)
    if n < 0 or int(n) != n:
        raise ValueError("polygamma order must be a nonnegative integer")
    return _apply(lambda z: _polygamma_scalar(int(n), z), x)


# ---------------------------------------------------------------------------
# admittance models


class AdmittanceModel:
    """Base class: a linear one-port described by its admittance Y(omega).

    Subclasses implement ``admittance(omega)`` for real omega.  The optional
    attribute ``inverse_l0`` gives lim_{w->0} j w Y(w) analytically; when it
    is ``None`` the limit is estimated numerically by :func:`discretize`.
    """

    inverse_l0: Optional[float] = None

    def admittance(self, omega):
        raise NotImplementedError

    def impedance(self, omega):
        return 1.0 / self.admittance(omega)

    def __call__(self, omega):
        return self.admittance(omega)


@dataclass(frozen=True)
class OhmicAdmittance(AdmittanceModel):
    """Resistor with a Drude cutoff, y = 1/(R + j L_c w) = 1/(R (1 - i w/w_c)).

    ``omega_c = inf`` is a pure conductance 1/R.
    """

    R: float
    omega_c: float = math.inf

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("resistance must be positive")
        if not self.omega_c > 0:
            raise ValueError("cutoff must be positive")

    @property
    def inverse_l0(self):
        return 0.0

    def admittance(self, omega):
        omega = np.asarray(omega, dtype=float)
        if math.isinf(self.omega_c):
            return np.full(omega.shape, 1.0 / self.R, dtype=complex)[()]
        return (1.0 / (self.R * (1.0 - 1j * omega / self.omega_c)))[()]

    def impedance(self, omega):
        omega = np.asarray(omega, dtype=float)
        if math.isinf(self.omega_c):
            return np.full(omega.shape, self.R, dtype=complex)[()]
        return (self.R * (1.0 - 1j * omega / self.omega_c))[()]


@dataclass(frozen=True)
class InductorAdmittance(AdmittanceModel):
    """Ideal inductor, Y = 1/(j L w)."""

    L: float

    @property
    def inverse_l0(self):
        return 1.0 / self.L

    def admittance(self, omega):
        omega = np.asarray(omega, dtype=float)
        with np.errstate(divide="ignore"):
            return (1.0 / (J * self.L * omega + 0j))[()]


@dataclass(frozen=True)
class ParallelAdmittance(AdmittanceModel):
    """Elements in parallel: admittances add."""

    parts: Tuple[AdmittanceModel, ...]

    @property
    def inverse_l0(self):
        vals = [p.inverse_l0 for p in self.parts]
        return None if any(v is None for v in vals) else float(sum(vals))

    def admittance(self, omega):
        return sum(p.admittance(omega) for p in self.parts)


@dataclass(frozen=True)
class CallableAdmittance(AdmittanceModel):
    """Wrap any ``omega -> complex Y`` function."""

    func: Callable
    inverse_l0: Optional[float] = None

    def admittance(self, omega):
        return np.asarray(self.func(omega), dtype=complex)[()]


@dataclass(frozen=True)
class TabulatedAdmittance(AdmittanceModel):
    """Samples of Y on a positive, increasing frequency grid.

    Values between samples are linearly interpolated in real and imaginary
    parts; outside the grid the admittance is taken as zero.  Negative
    frequencies use Y(-w) = conj Y(w).
    """

    omega: np.ndarray
    values: np.ndarray
    inverse_l0: Optional[float] = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if omega.ndim != 1 or omega.shape != values.shape or omega.size < 2:
            raise ValueError("tabulated admittance needs matching 1-D arrays of length >= 2")
        if np.any(omega <= 0) or np.any(np.diff(omega) <= 0):
            raise ValueError("tabulated frequencies must be positive and strictly increasing")
        bad = np.flatnonzero(values.real < 0)
        if bad.size:
            i = bad[0]
            raise PassivityError(f"Re Y < 0 at omega = {omega[i]:g} rad/s (Re Y = {values.real[i]:g} S)")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "values", values)

    def admittance(self, omega):
        w = np.asarray(omega, dtype=float)
        aw = np.abs(w)
        re = np.interp(aw, self.omega, self.values.real, left=0.0, right=0.0)
        im = np.interp(aw, self.omega, self.values.imag, left=0.0, right=0.0)
        return (re + 1j * np.sign(w) * im)[()]


def read_admittance_csv(path) -> TabulatedAdmittance:
    """Read ``omega_rad_s,re_Y_S,im_Y_S`` rows (header row required)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"omega_rad_s", "re_Y_S", "im_Y_S"}
        if reader.fieldnames is None or not need <= {f.strip() for f in reader.fieldnames}:
            raise ValueError(f"{path}: expected header omega_rad_s,re_Y_S,im_Y_S")
        rows = [{k.strip(): v for k, v in r.items()} for r in reader]
    omega = np.array([float(r["omega_rad_s"]) for r in rows])
    values = np.array([float(r["re_Y_S"]) + 1j * float(r["im_Y_S"]) for r in rows])
    return TabulatedAdmittance(omega, values)


# ---------------------------------------------------------------------------
# Caldeira-Leggett discretization


@dataclass(frozen=True)
class BathOscillator:
    m: int
    omega: float
    y: float
    c: float
    l: float


@dataclass(frozen=True)
class BathDiscretization:
    """Series-LC comb standing in for an admittance, plus an optional L0."""

    oscillators: Tuple[BathOscillator, ...]
    l0: Optional[float]
    delta_omega: float

    def __len__(self):
        return len(self.oscillators)


def _estimate_inverse_l0(model: AdmittanceModel, scale: float) -> Optional[float]:
    # lim_{w->0} j w Y(w); accepted only when it has settled to a nonzero value
    w1, w2 = scale * 1e-6, scale * 1e-8
    g1 = complex(J * w1 * model.admittance(w1))
    g2 = complex(J * w2 * model.admittance(w2))
    if not (np.isfinite(g1) and np.isfinite(g2)) or g2 == 0:
        return None
    if abs(g1 - g2) > 1e-4 * abs(g2):
        return None
    return g2.real


def discretize(y: AdmittanceModel, delta_omega: float, omega_max: float) -> BathDiscretization:
    """Replace Re Y by a comb of series LC oscillators at w_m = m dw.

    Each oscillator has y_m = (2 dw / pi w_m) Re Y(w_m), C_m = y_m / w_m and
    L_m = 1 / (y_m w_m).  Frequencies where Re Y vanishes carry no
    oscillator.  ``l0`` is 1 / lim j w Y(w) when that limit is finite and
    nonzero, else ``None``.

    Raises
    ------
    PassivityError
        If Re Y(w_m) < 0 at any comb frequency.
    """
    if not delta_omega > 0:
        raise ValueError("delta_omega must be positive")
    n = int(math.floor(omega_max / delta_omega + 1e-9))
    omegas = delta_omega * np.arange(1, n + 1)
    re_y = np.real(np.asarray(y.admittance(omegas), dtype=complex)).reshape(-1) if n else np.zeros(0)
    if re_y.size and np.any(re_y < 0):
        i = int(np.flatnonzero(re_y < 0)[0])
        raise PassivityError(f"Re Y < 0 at omega = {omegas[i]:g} rad/s")
    oscillators = []
    for m, (w, g) in enumerate(zip(omegas, re_y), start=1):
        if g == 0:
            continue
        ym = 2.0 * delta_omega * g / (math.pi * w)
        oscillators.append(BathOscillator(m, float(w), ym, ym / w, 1.0 / (ym * w)))

    inv_l0 = y.inverse_l0
    if inv_l0 is None:
        inv_l0 = _estimate_inverse_l0(y, delta_omega)
    l0 = 1.0 / inv_l0 if inv_l0 else None
    return BathDiscretization(tuple(oscillators), l0, float(delta_omega))


def reconstruct(bath: BathDiscretization, omega, eta: float):
    """Admittance of the comb at the complex frequency z = omega + i eta."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    z = np.asarray(omega, dtype=float) + 1j * eta
    out = np.zeros(z.shape, dtype=complex)
    if bath.l0 is not None:
        out += 1j / (bath.l0 * z)
    for osc in bath.oscillators:
        out += 1.0 / (J * osc.l * z + 1.0 / (J * osc.c * z))
    return out[()]


def attach_bath(
    graph: CircuitGraph, bath: BathDiscretization, node: str, ground: Optional[str] = None, prefix: str = "bath"
) -> CircuitGraph:
    """Append the bath oscillators between ``node`` and ``ground``.

    Oscillator m becomes an inductor L_m from ``node`` to a new node
    ``<prefix><m>`` and a capacitor C_m from that node to ground, so its
    energy is q_m^2/2C_m + (phi_m - phi)^2/2L_m.  L0, if present, is an
    inductor straight across the port.
    """
    ground = graph.ground if ground is None else ground
    branches = list(graph.branches)
    for osc in bath.oscillators:
        inner = f"{prefix}{osc.m}"
        if inner in graph.nodes:
            raise ValueError(f"node {inner!r} already exists; choose another prefix")
        branches.append(Branch(f"L{prefix}{osc.m}", INDUCTOR, node, inner, osc.l))
        branches.append(Branch(f"C{prefix}{osc.m}", CAPACITOR, inner, ground, osc.c))
    if bath.l0 is not None:
        branches.append(Branch(f"L{prefix}0", INDUCTOR, node, ground, bath.l0))
    return CircuitGraph.from_branches(branches, graph.ground)


def write_bath_csv(bath: BathDiscretization, path) -> None:
    """Write ``L0,<henries or empty>`` then ``m,omega_m,C_m,L_m`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["L0", "" if bath.l0 is None else repr(bath.l0)])
        w.writerow(["m", "omega_m", "C_m", "L_m"])
        for o in bath.oscillators:
            w.writerow([o.m, repr(o.omega), repr(o.c), repr(o.l)])


# ---------------------------------------------------------------------------
# fluctuation spectra


def _real_part(model, omega, attr):
    if hasattr(model, attr):
        val = getattr(model, attr)(omega)
    else:
        val = model(omega)
    return np.real(np.asarray(val, dtype=complex))


def nyquist_current_psd(y, T: float, omega):
    """Classical current noise S_I = 2 k_B T Re Y(omega)."""
    if not T > 0:
        raise ValueError("temperature must be positive")
    return (2.0 * k_B * T * _real_part(y, omega, "admittance"))[()]


def johnson_voltage_psd(z, T: float, omega):
    """Classical voltage noise S_V = 2 k_B T Re Z(omega)."""
    if not T > 0:
        raise ValueError("temperature must be positive")
    return (2.0 * k_B * T * _real_part(z, omega, "impedance"))[()]


def _emission_weight(omega, T):
    """hbar w [coth(beta hbar w / 2) + 1] = 2 hbar w / (1 - exp(-beta hbar w))."""
    omega = np.asarray(omega, dtype=float)
    if T == 0:
        return np.where(omega > 0, 2.0 * hbar * omega, 0.0)
    x = hbar * omega / (k_B * T)
    out = np.empty_like(x)
    small = x == 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out[~small] = 2.0 * hbar * omega[~small] / (-np.expm1(-x[~small]))
    out[small] = 2.0 * k_B * T
    return out


def quantum_psd(z, T: float, omega):
    """Quantum voltage and flux spectral densities of an impedance at T.

    s_vv = hbar w [coth(beta hbar w/2) + 1] Re Z(w) and s_phiphi = s_vv / w^2.
    Positive frequencies are emission by the environment, negative ones
    absorption.  ``T = 0`` is the zero-temperature limit.

    Parameters
    ----------
    z : AdmittanceModel or callable
        Anything with an ``impedance`` method, or a callable returning Z.
    """
    if T < 0:
        raise ValueError("temperature must be nonnegative")
    omega = np.asarray(omega, dtype=float)
    re_z = _real_part(z, omega, "impedance")
    s_vv = _emission_weight(omega, T) * re_z
    with np.errstate(divide="ignore", invalid="ignore"):
        s_pp = s_vv / omega**2
    return s_pp[()], s_vv[()]


def write_psd_csv(omega, values, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega_rad_s", "S_value"])
        for a, b in zip(np.atleast_1d(omega), np.atleast_1d(values)):
            w.writerow([repr(float(a)), repr(float(b))])


# ---------------------------------------------------------------------------
# damped LC oscillator


@dataclass(frozen=True)
class DampedLCParams:
    """Dimensionless groups of the resistively damped LC oscillator.

    Attributes
    ----------
    theta : k_B T / hbar w0
    kappa : 1 / (2 R C w0)
    lambda_plus, lambda_minus : (kappa +- sqrt(kappa^2 - 1)) / (2 pi theta);
        complex conjugates when kappa < 1, infinite at theta = 0
    lambda_c : (w_c / w0 - 2 kappa) / (2 pi theta)
    delta : <Q^2> - <Phi^2> / Z0^2 (C^2); filled in by the variance routine
    """

    theta: float
    kappa: float
    wc_ratio: float
    omega0: float
    z0: float
    lambda_plus: complex = field(default=math.inf)
    lambda_minus: complex = field(default=math.inf)
    lambda_c: float = math.inf
    delta: float = math.nan

    @classmethod
    def from_circuit(cls, L, C, R, omega_c, T) -> "DampedLCParams":
        for name, v in (("L", L), ("C", C), ("R", R), ("omega_c", omega_c)):
            if not v > 0:
                raise ValueError(f"{name} must be positive")
        if T < 0:
            raise ValueError("temperature must be nonnegative")
        omega0 = 1.0 / math.sqrt(L * C)
        z0 = math.sqrt(L / C)
        theta = k_B * T / (hbar * omega0)
        kappa = 1.0 / (2.0 * R * C * omega0)
        wc = omega_c / omega0
        if theta > 0:
            s = cmath.sqrt(kappa * kappa - 1.0)
            lp = (kappa + s) / (2 * math.pi * theta)
            lm = (kappa - s) / (2 * math.pi * theta)
            if s.imag == 0:
                lp, lm = lp.real, lm.real
            lc = (wc - 2 * kappa) / (2 * math.pi * theta)
        else:
            lp = lm = lc = math.inf
        return cls(theta, kappa, wc, omega0, z0, lp, lm, lc)


def _reduced_impedance(x, kappa, wc):
    # Z / Z0 at reduced frequency x = w / w0; the damping admittance is
    # Z0 y = 2 kappa / (1 - i x / wc)
    y = 2.0 * kappa if math.isinf(wc) else 2.0 * kappa / (1.0 - 1j * x / wc)
    return 1.0 / (1j / x - 1j * x + y)


def _coth_half(x, theta):
    if theta == 0:
        return 1.0
    return 1.0 / math.tanh(x / (2.0 * theta))


def _integrate(f, kappa, theta, wc, limit_at_zero):
    upper = max(50.0, 20.0 * wc if math.isfinite(wc) else 0.0, 50.0 * theta)
    marks = {1.0, 1.0 + kappa, abs(1.0 - kappa), 2.0 * kappa, theta}
    if kappa > 0:
        marks.add(1.0 / (2.0 * kappa))
    if math.isfinite(wc):
        marks.add(wc)
    points = sorted(p for p in marks if 0 < p < upper)

    def g(x):
        return limit_at_zero if x == 0 else f(x)

    main, err_main, *info = integrate.quad(
        g, 0.0, upper, points=points, limit=2000, epsabs=0.0, epsrel=1e-10, full_output=1
    )
    tail, err_tail, *info_t = integrate.quad(g, upper, math.inf, limit=500, epsabs=0.0, epsrel=1e-10, full_output=1)
    total = main + tail
    err = err_main + err_tail
    if not np.isfinite(total) or err > 1e-7 * abs(total):
        raise ConvergenceError(f"variance quadrature reached only {err:.3g} absolute on a value of {total:.6g}")
    return total / math.pi


def damped_lc_variance_quadrature(L, C, R, omega_c, T) -> Tuple[float, float]:
    """<Phi^2> and <Q^2> of a resistively damped LC by direct integration.

    <Phi^2> = (hbar/pi) int_0^inf coth(beta hbar w/2) Re Z(w) / w dw and
    <Q^2> = (hbar/pi) int_0^inf coth(beta hbar w/2) C^2 w Re Z(w) dw, with
    Z = 1/(1/jLw + jCw + y) and y the Drude-cutoff resistor admittance.
    <Q^2> is infinite for an infinite cutoff.

    Raises
    ------
    ConvergenceError
        If the adaptive quadrature misses a relative tolerance of 1e-7.
    """
    p = DampedLCParams.from_circuit(L, C, R, omega_c, T)
    kappa, theta, wc = p.kappa, p.theta, p.wc_ratio

    def f_phi(x):
        return _coth_half(x, theta) * _reduced_impedance(x, kappa, wc).real / x

    def f_q(x):
        return _coth_half(x, theta) * x * _reduced_impedance(x, kappa, wc).real

    # at w -> 0, coth ~ 2 theta / x and Re Z/Z0 ~ 2 kappa x^2
    phi_r = _integrate(f_phi, kappa, theta, wc, 4.0 * kappa * theta)
    q_r = _integrate(f_q, kappa, theta, wc, 0.0) if math.isfinite(wc) else math.inf
    return hbar * p.z0 * phi_r, hbar / p.z0 * q_r


def _real_checked(value: complex, what: str) -> float:
    if abs(value.imag) > 1e-10 * max(abs(value.real), 1e-300):
        raise ConvergenceError(f"{what}: imaginary residue {value.imag:.3g} on real part {value.real:.6g}")
    return value.real


def _drude_roots(kappa, wc):
    # nu = -r_i are the zeros of P(nu) = nu^3 + wc nu^2 + (1 + 2 kappa wc) nu + wc
    coeffs = np.array([1.0, wc, 1.0 + 2.0 * kappa * wc, wc])
    nus = np.roots(coeffs).astype(complex)
    dcoeffs = np.polyder(coeffs)
    for _ in range(2):
        nus = nus - np.polyval(coeffs, nus) / np.polyval(dcoeffs, nus)
    return -nus


def _drude_exact_raw(kappa, theta, wc):
    r = _drude_roots(kappa, wc)
    den = np.array([np.prod([r[j] - r[i] for j in range(3) if j != i]) for i in range(3)])
    b = (wc - r) / den  # residues of (wc + nu) / P
    a = (wc - (1.0 + 2.0 * kappa * wc) * r) / den  # residues of (wc + (1 + 2 kappa wc) nu) / P
    if theta == 0:
        logs = np.log(r)
        phi = -np.sum(b * logs) / math.pi
        q = -np.sum(a * logs) / math.pi
    else:
        psi = np.array([_digamma_scalar(1.0 + ri / (2 * math.pi * theta)) for ri in r])
        phi = theta - np.sum(b * psi) / math.pi
        q = theta - np.sum(a * psi) / math.pi
    return complex(phi), complex(q)


def _min_root_gap(kappa, wc):
    r = _drude_roots(kappa, wc)
    scale = max(1.0, float(np.max(np.abs(r))))
    return min(abs(r[i] - r[j]) for i in range(3) for j in range(i + 1, 3)) / scale


def _drude_exact(kappa, theta, wc):
    """Exact reduced variances for the Drude cutoff (three-pole Matsubara sum)."""
    if _min_root_gap(kappa, wc) > 1e-3:
        phi, q = _drude_exact_raw(kappa, theta, wc)
    else:
        # residues blow up at a double root; the variance itself is analytic
        # in kappa, so step around the coalescence and Richardson-combine
        h = 1e-3 * kappa
        vals = {}
        for k in (1, 2):
            pairs = [_drude_exact_raw(kappa + s * k * h, theta, wc) for s in (1, -1)]
            vals[k] = tuple(0.5 * (pairs[0][i] + pairs[1][i]) for i in range(2))
        phi, q = ((4 * vals[1][i] - vals[2][i]) / 3 for i in range(2))
    return _real_checked(phi, "flux variance"), _real_checked(q, "charge variance")


def _drude_large_cutoff(kappa, theta, wc):
    """Reduced variances from the digamma pair formula valid for w_c >> w0."""
    if not wc > 2 * kappa:
        raise ValueError("the large-cutoff formula needs omega_c > 2 kappa omega0; use form='exact'")
    s = cmath.sqrt(kappa * kappa - 1.0)
    s2 = kappa * kappa - 1.0
    if theta == 0:
        ratio = 1.0 if s == 0 else cmath.asinh(s) / s  # ln(kappa + s)/s, continued through kappa = 1
        phi = ratio / math.pi
        delta = kappa / math.pi * (2.0 * math.log(wc - 2 * kappa) - 2.0 * kappa * ratio)
        return _real_checked(phi, "flux variance"), _real_checked(phi + delta, "charge variance")

    c = 2.0 * math.pi * theta
    a = 1.0 + kappa / c
    lc_term = 2.0 * _digamma_scalar(1.0 + (wc - 2 * kappa) / c)
    if abs(s) < 1e-3:
        x2 = s2 / c**2
        psi1, psi2, psi3 = (_polygamma_scalar(n, a) for n in (1, 2, 3))
        phi = theta + (psi1 + x2 * psi3 / 6.0) / (2.0 * math.pi * c)
        g1 = _digamma_scalar(a) + (kappa / c) * psi1
        g3 = 3.0 * psi2 / c**2 + kappa / c**3 * psi3
        pair = 2.0 * g1 + g3 * s2 / 3.0
    else:
        psi_p = _digamma_scalar(1.0 + (kappa + s) / c)
        psi_m = _digamma_scalar(1.0 + (kappa - s) / c)
        phi = theta + (psi_p - psi_m) / (2.0 * math.pi * s)
        pair = ((kappa + s) * psi_p - (kappa - s) * psi_m) / s
    delta = kappa / math.pi * (lc_term - pair)
    return _real_checked(complex(phi), "flux variance"), _real_checked(complex(phi + delta), "charge variance")


def damped_lc_variance_closed(L, C, R, omega_c, T, form: str = "exact"):
    """Closed-form <Phi^2>, <Q^2> of the damped LC and its dimensionless groups.

    Parameters
    ----------
    form : {"exact", "large_cutoff"}
        ``"exact"`` sums the three poles of the Drude-cutoff response and is
        exact for any w_c.  ``"large_cutoff"`` is the two-digamma formula
        (with its charge excess Delta) obtained when w_c >> w0; it requires
        w_c > 2 kappa w0 and drifts from the exact value by several percent
        at w_c / w0 = 10.

    Returns
    -------
    phi2 : float (Wb^2)
    q2 : float (C^2)
    params : DampedLCParams with ``delta`` filled in
    """
    p = DampedLCParams.from_circuit(L, C, R, omega_c, T)
    if form == "exact":
        if math.isinf(p.wc_ratio):
            raise ValueError("the charge variance diverges for an infinite cutoff")
        phi_r, q_r = _drude_exact(p.kappa, p.theta, p.wc_ratio)
    elif form == "large_cutoff":
        phi_r, q_r = _drude_large_cutoff(p.kappa, p.theta, p.wc_ratio)
    else:
        raise ValueError(f"unknown form {form!r}")
    phi2 = hbar * p.z0 * phi_r
    q2 = hbar / p.z0 * q_r
    delta = q2 - phi2 / p.z0**2
    return phi2, q2, DampedLCParams(
        p.theta, p.kappa, p.wc_ratio, p.omega0, p.z0, p.lambda_plus, p.lambda_minus, p.lambda_c, delta
    )
