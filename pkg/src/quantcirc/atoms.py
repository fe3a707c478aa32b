"""Quantized single-degree-of-freedom circuits: oscillators, Cooper-pair
boxes, transmons, fluxonium-type atoms, SQUID and array reductions, and
noise sensitivities of their transition frequencies.

Energies are in joules.  The reduced flux is phi = Phi / phi0 and the
conjugate charge q (units of 2e) obeys [phi, q] = i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, optimize

from .constants import e, hbar, k_B, phi0
from .hamlag import build_hamiltonian
from .netlist import CircuitGraph

__all__ = [
    "ArrayReduction",
    "AtomSpec",
    "ChargeBasis",
    "ConvergenceError",
    "DephasingEstimate",
    "FockBasis",
    "OperatorMatrix",
    "OscillatorParams",
    "RegimeReport",
    "SquidReduction",
    "ThreeWavePoint",
    "array_reduce",
    "atom_from_graph",
    "charge_basis_hamiltonian",
    "classify_regime",
    "dephasing_rate",
    "fock_basis_hamiltonian",
    "hamiltonian",
    "lc_quantize",
    "sensitivity",
    "spectrum",
    "squid_reduce",
    "thermal_variances",
    "three_wave_search",
    "transition_frequency",
]

DEFAULT_N_CUT = 30
DEFAULT_N_MAX = 60
HERMITIAN_TOL = 1e-12
CONVERGENCE_TOL = 1e-9


class ConvergenceError(ArithmeticError):
    """A truncation or finite-difference procedure failed to converge."""


# ---------------------------------------------------------------------------
# harmonic oscillator


@dataclass(frozen=True)
class OscillatorParams:
    """Quantum LC oscillator: frequency, impedance and zero-point spreads."""

    omega0: float
    z0: float
    phi_zpf: float
    q_zpf: float

    @property
    def frequency_hz(self) -> float:
        return self.omega0 / (2 * math.pi)


def lc_quantize(L: float, C: float) -> OscillatorParams:
    """Quantize a parallel LC: phi = phi_zpf (c + c^dag), phi_zpf = sqrt(hbar Z0 / 2)."""
    if not (L > 0 and C > 0):
        raise ValueError("L and C must be positive")
    z0 = math.sqrt(L / C)
    return OscillatorParams(1.0 / math.sqrt(L * C), z0, math.sqrt(hbar * z0 / 2), math.sqrt(hbar / (2 * z0)))


def thermal_variances(L: float, C: float, T: float) -> Tuple[float, float]:
    """Thermal-equilibrium <phi^2> (Wb^2) and <q^2> (C^2) of an LC oscillator.

    Both are the zero-point values times coth(hbar w0 / 2 k_B T); T = 0 gives
    the ground-state spreads.
    """
    if T < 0:
        raise ValueError("temperature must be nonnegative")
    osc = lc_quantize(L, C)
    thermal = 2 * k_B * T
    factor = 1.0 if thermal == 0 else 1.0 / math.tanh(hbar * osc.omega0 / thermal)
    return osc.phi_zpf**2 * factor, osc.q_zpf**2 * factor


# ---------------------------------------------------------------------------
# atom specification and operator matrices


@dataclass(frozen=True)
class AtomSpec:
    """H = 4 E_C (q - n_g)^2 - E_J cos(phi) + E_L/2 (phi - phi_ext)^2.

    Attributes
    ----------
    ec : charging energy e^2 / 2 C_sigma (J)
    ej : Josephson energy (J)
    el : inductive energy phi0^2 / L (J); zero for an unshunted junction
    n_g : offset charge in units of 2e
    phi_ext : reduced external flux
    """

    ec: float
    ej: float
    el: float = 0.0
    n_g: float = 0.0
    phi_ext: float = 0.0

    def __post_init__(self):
        if not self.ec > 0:
            raise ValueError("E_C must be positive")
        if self.ej < 0 or self.el < 0:
            raise ValueError("E_J and E_L must be nonnegative")

    @classmethod
    def from_circuit(cls, C: float, ej: float, L: Optional[float] = None, n_g: float = 0.0, phi_ext: float = 0.0):
        """Build from a total capacitance, junction energy and optional shunt inductance."""
        el = 0.0 if L is None or math.isinf(L) else phi0**2 / L
        return cls(e**2 / (2 * C), ej, el, n_g, phi_ext)

    def with_param(self, name: str, value: float) -> "AtomSpec":
        return replace(self, **{name: value})


@dataclass(frozen=True)
class ChargeBasis:
    n_cut: int

    @property
    def dim(self) -> int:
        return 2 * self.n_cut + 1


@dataclass(frozen=True)
class FockBasis:
    n_max: int
    z_char: float  # characteristic impedance of the harmonic part (ohm)

    @property
    def dim(self) -> int:
        return self.n_max


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Hermitian matrix (J) on a truncated basis.

    ``converged`` is False when enlarging the truncation moved the ground
    energy by more than 1e-9 relative.
    """

    basis: Union[ChargeBasis, FockBasis]
    data: np.ndarray
    converged: bool = True

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"matrix shape {data.shape} does not match basis dimension {self.basis.dim}")
        scale = max(float(np.max(np.abs(data))), np.finfo(float).tiny)
        if float(np.max(np.abs(data - data.conj().T))) > HERMITIAN_TOL * scale:
            raise ValueError("operator matrix is not Hermitian")
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.basis.dim


def charge_basis_hamiltonian(spec: AtomSpec, n_cut: int = DEFAULT_N_CUT) -> OperatorMatrix:
    """Junction Hamiltonian in the Cooper-pair number basis |n>, |n| <= n_cut.

    Diagonal 4 E_C (n - n_g)^2, nearest-neighbour hopping -E_J / 2.
    """
    if spec.el != 0:
        raise ValueError("charge basis needs E_L = 0; use fock_basis_hamiltonian for inductively shunted atoms")
    if n_cut < 1:
        raise ValueError("n_cut must be at least 1")
    n = np.arange(-n_cut, n_cut + 1)
    h = np.diag(4.0 * spec.ec * (n - spec.n_g) ** 2).astype(complex)
    off = np.full(2 * n_cut, -0.5 * spec.ej)
    h += np.diag(off, 1) + np.diag(off, -1)
    return OperatorMatrix(ChargeBasis(n_cut), h)


def _fock_matrix(spec: AtomSpec, n_max: int) -> np.ndarray:
    hw = math.sqrt(8.0 * spec.ec * spec.el)
    phi_zpf = (2.0 * spec.ec / spec.el) ** 0.25
    ladder = np.diag(np.sqrt(np.arange(1, n_max)), 1)
    phi_op = phi_zpf * (ladder + ladder.T)
    lam, vec = linalg.eigh(phi_op)
    # shifted variable phi' = phi - phi_ext keeps the harmonic part diagonal
    cos_op = (vec * np.cos(lam + spec.phi_ext)) @ vec.T
    h = np.diag(hw * (np.arange(n_max) + 0.5)) - spec.ej * cos_op
    return 0.5 * (h + h.T)


def fock_basis_hamiltonian(spec: AtomSpec, n_max: int = DEFAULT_N_MAX, check: bool = True) -> OperatorMatrix:
    """Inductively shunted junction in the Fock basis of its LC part.

    H = hbar w_LC (c^dag c + 1/2) - E_J cos(phi' + phi_ext) with
    hbar w_LC = sqrt(8 E_C E_L) and phi' = (2 E_C/E_L)^(1/4) (c + c^dag).
    The cosine is applied through the eigendecomposition of the truncated
    phi' operator.  The offset charge is irrelevant here and ignored.

    With ``check`` the ground energy is recomputed at n_max + 10 and the
    result flagged unconverged if it moves by more than 1e-9 relative.
    """
    if spec.el <= 0:
        raise ValueError("Fock basis needs E_L > 0; use charge_basis_hamiltonian")
    if n_max < 4:
        raise ValueError("n_max must be at least 4")
    h = _fock_matrix(spec, n_max)
    converged = True
    if check:
        e0 = linalg.eigvalsh(h, subset_by_index=[0, 0])[0]
        e0_big = linalg.eigvalsh(_fock_matrix(spec, n_max + 10), subset_by_index=[0, 0])[0]
        scale = max(abs(e0_big), math.sqrt(8.0 * spec.ec * spec.el))
        converged = abs(e0 - e0_big) <= CONVERGENCE_TOL * scale
    z_char = math.sqrt((phi0**2 / spec.el) / (e**2 / (2 * spec.ec)))
    return OperatorMatrix(FockBasis(n_max, z_char), h.astype(complex), converged)


def hamiltonian(spec: AtomSpec, size: Optional[int] = None) -> OperatorMatrix:
    """Pick the natural basis: charge basis when E_L = 0, Fock basis otherwise."""
    if spec.el == 0:
        return charge_basis_hamiltonian(spec, DEFAULT_N_CUT if size is None else size)
    return fock_basis_hamiltonian(spec, DEFAULT_N_MAX if size is None else size)


def spectrum(op: Union[OperatorMatrix, np.ndarray], k: Optional[int] = None) -> np.ndarray:
    """The k lowest eigenvalues (J), ascending."""
    data = op.data if isinstance(op, OperatorMatrix) else np.asarray(op)
    dim = data.shape[0]
    k = dim if k is None else int(k)
    if not 1 <= k <= dim:
        raise ValueError(f"requested {k} levels from a {dim}-dimensional matrix")
    try:
        return linalg.eigvalsh(data, subset_by_index=[0, k - 1])
    except linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceError(f"eigensolver failed: {exc}") from None


def transition_frequency(spec: AtomSpec, level_pair: Tuple[int, int] = (0, 1), size: Optional[int] = None) -> float:
    """(E_j - E_i) / hbar in rad/s."""
    i, j = level_pair
    levels = spectrum(hamiltonian(spec, size), max(i, j) + 1)
    return (levels[j] - levels[i]) / hbar


# ---------------------------------------------------------------------------
# SQUID and array reductions


@dataclass(frozen=True)
class SquidReduction:
    """Two junctions in a loop seen as one: -ej_eff cos(phi - delta).

    ``phase_offset`` is arctan(d tan x) with x = Phi_ext / 2 phi0; it equals
    delta while cos x > 0.  ``phasor_angle`` is delta on the whole circle
    (it differs from ``phase_offset`` by pi when cos x < 0).
    """

    ej_eff: float
    phase_offset: float
    d: float
    phasor_angle: float = 0.0

    def potential(self, phi):
        return -self.ej_eff * np.cos(np.asarray(phi) - self.phasor_angle)


def squid_reduce(ej1: float, ej2: float, flux_ext: float) -> SquidReduction:
    """Reduce -E1 cos(phi + x) - E2 cos(phi - x), x = Phi_ext / 2 phi0.

    ej_eff = E_sigma sqrt(cos^2 x + d^2 sin^2 x), the same quantity as
    E_sigma |cos x| sqrt(1 + d^2 tan^2 x) but finite at the tan poles, where
    it equals E_sigma |d|.
    """
    if ej1 < 0 or ej2 < 0 or ej1 + ej2 == 0:
        raise ValueError("junction energies must be nonnegative and not both zero")
    esum = ej1 + ej2
    d = (ej2 - ej1) / esum
    x = flux_ext / (2 * phi0)
    c, s = math.cos(x), math.sin(x)
    ej_eff = esum * math.sqrt(c * c + d * d * s * s)
    offset = math.atan(d * math.tan(x)) if c != 0 else math.copysign(math.pi / 2, d * s)
    return SquidReduction(ej_eff, offset, d, math.atan2(d * s, c))


@dataclass(frozen=True)
class ArrayReduction:
    """M identical junctions in series: -M E_J cos(phi / M)."""

    ej: float
    M: int
    l_eff: float
    phase_slip_factor: Optional[float] = None

    def potential(self, phi):
        return -self.M * self.ej * np.cos(np.asarray(phi) / self.M)

    def quadratic(self, phi):
        """-M E_J + (E_J / 2M) phi^2, the small-phase form."""
        phi = np.asarray(phi)
        return -self.M * self.ej + self.ej / (2 * self.M) * phi**2

    def quartic_bound(self, phi):
        """Bound on |potential - quadratic|: E_J phi^4 / (24 M^3)."""
        return self.ej * np.asarray(phi) ** 4 / (24 * self.M**3)


def array_reduce(ej: float, M: int, ec: Optional[float] = None) -> ArrayReduction:
    """Series array of M junctions; l_eff = M phi0^2 / E_J.

    With ``ec`` the phase-slip suppression factor exp(-sqrt(8 E_J / E_C)) is
    reported; the reduction assumes it is small.
    """
    if M < 1 or int(M) != M:
        raise ValueError("M must be a positive integer")
    if not ej > 0:
        raise ValueError("E_J must be positive")
    slip = None if ec is None else math.exp(-math.sqrt(8 * ej / ec))
    return ArrayReduction(ej, int(M), M * (phi0**2 / ej), slip)


# ---------------------------------------------------------------------------
# sensitivities and dephasing


def _transition(spec, parameter, value, level_pair, size):
    return transition_frequency(spec.with_param(parameter, value), level_pair, size)


def sensitivity(
    spec: AtomSpec,
    parameter: str,
    level_pair: Tuple[int, int] = (0, 1),
    size: Optional[int] = None,
    h0: float = 1e-2,
    rtol: float = 1e-6,
    max_halvings: int = 12,
) -> float:
    """d(omega_ij)/d(parameter) in rad/s per unit of ``parameter``.

    Central differences D(h) are Richardson-combined as (4 D(h/2) - D(h))/3;
    the step is halved until two successive combined estimates agree to
    ``rtol`` relative.  Differences below the eigenvalue rounding floor,
    about 100 eps ||H|| / (hbar h), or below 1e-11 of the transition
    frequency count as agreement.

    Raises
    ------
    ConvergenceError
        If no two estimates agree within ``max_halvings`` halvings.
    """
    if parameter not in ("phi_ext", "n_g"):
        raise ValueError("parameter must be 'phi_ext' or 'n_g'")
    x0 = getattr(spec, parameter)
    omega = abs(_transition(spec, parameter, x0, level_pair, size))
    norm = float(np.max(np.sum(np.abs(hamiltonian(spec, size).data), axis=1)))
    eps = np.finfo(float).eps

    def floor(step):
        return max(1e-11 * omega, 100 * eps * norm / (hbar * step), np.finfo(float).tiny)

    def central(h):
        up = _transition(spec, parameter, x0 + h, level_pair, size)
        down = _transition(spec, parameter, x0 - h, level_pair, size)
        return (up - down) / (2 * h)

    h = h0
    d_h = central(h)
    d_half = central(h / 2)
    previous = (4 * d_half - d_h) / 3
    for _ in range(max_halvings):
        h /= 2
        d_h, d_half = d_half, central(h / 2)
        current = (4 * d_half - d_h) / 3
        if abs(current - previous) <= max(rtol * abs(current), floor(h)):
            return current
        previous = current
    raise ConvergenceError(f"finite-difference derivative with respect to {parameter} did not settle")


@dataclass(frozen=True)
class DephasingEstimate:
    """A dephasing rate known only up to an overall constant."""

    value: float
    formula: str
    proportional: bool = True


def dephasing_rate(
    spec: AtomSpec,
    d_omega_d_phi: Optional[float] = None,
    d_omega_d_q: Optional[float] = None,
    s_qq: Optional[float] = None,
    s_phiphi: Optional[float] = None,
    omega: Optional[float] = None,
) -> DephasingEstimate:
    """Bracketed combination controlling pure dephasing.

    For E_L > 0 charge noise acts as flux noise suppressed by
    (hbar omega / E_L)^2, and the rate scales as
    (d omega_ge / d phi_ext)^2 [(hbar omega / E_L)^2 S_qq + S_phiphi].
    For E_L = 0 it scales as (d omega_ge / d q_ext)^2 S_qq.
    ``omega`` is the noise frequency (rad/s).  The overall prefactor is not
    fixed by this estimate, hence ``proportional``.
    """
    if spec.el > 0:
        if d_omega_d_phi is None or s_qq is None or s_phiphi is None or omega is None:
            raise ValueError("E_L > 0 needs d_omega_d_phi, s_qq, s_phiphi and omega")
        weight = (hbar * omega / spec.el) ** 2
        value = d_omega_d_phi**2 * (weight * s_qq + s_phiphi)
        return DephasingEstimate(value, "(dw/dphi_ext)^2 ((hbar w/E_L)^2 S_qq + S_phiphi)")
    if d_omega_d_q is None or s_qq is None:
        raise ValueError("E_L = 0 needs d_omega_d_q and s_qq")
    return DephasingEstimate(d_omega_d_q**2 * s_qq, "(dw/dq_ext)^2 S_qq")


# ---------------------------------------------------------------------------
# regime map

_EJ_EC_ROWS = ("<<1", "~1", ">>1", ">>>>1")
_EL_COLS = ("0", "<<1", "~1", ">>1")
_TABLE = {
    ("<<1", "0"): "cooper-pair box",
    ("~1", "0"): "quantronium",
    ("~1", "<<1"): "fluxonium",
    (">>1", "0"): "transmon",
    (">>1", ">>1"): "flux qubit",
    (">>>>1", "~1"): "phase qubit",
}


@dataclass(frozen=True)
class RegimeReport:
    """Position of an atom in the (E_J/E_C, E_L/(E_J - E_L)) plane.

    The row and column labels use decade-wide bins chosen here; they are
    indicative, not sharp boundaries.
    """

    ej_over_ec: float
    el_ratio: float
    row: str
    column: str
    label: str
    exact_cell: bool


def classify_regime(spec: AtomSpec) -> RegimeReport:
    """Nearest named cell of the circuit family table for ``spec``."""
    r = spec.ej / spec.ec
    if spec.el == 0:
        s = 0.0
    elif spec.ej > spec.el:
        s = spec.el / (spec.ej - spec.el)
    else:
        s = math.inf  # no hysteretic double well at all
    row = 0 if r < 0.3 else 1 if r < 10 else 2 if r < 1e3 else 3
    col = 0 if s == 0 else 1 if s < 0.3 else 2 if s < 3 else 3
    key = (_EJ_EC_ROWS[row], _EL_COLS[col])
    exact = key in _TABLE
    if not exact:
        index = {(_EJ_EC_ROWS.index(a), _EL_COLS.index(b)): name for (a, b), name in _TABLE.items()}
        best = min(index, key=lambda rc: (abs(rc[0] - row) + abs(rc[1] - col), rc))
        label = index[best]
    else:
        label = _TABLE[key]
    return RegimeReport(r, s, key[0], key[1], label, exact)


# ---------------------------------------------------------------------------
# three-wave-mixing search (exploratory)


@dataclass(frozen=True)
class ThreeWavePoint:
    alpha: float
    phi_ext: float
    phi_min: float
    c2: float
    c3: float
    c4: float


def _asym_potential_derivs(phi, alpha, n, phi_ext):
    a = (phi_ext - phi) / n
    return (
        -alpha * math.cos(phi) - n * math.cos(a),
        alpha * math.sin(phi) - math.sin(a),
        alpha * math.cos(phi) + math.cos(a) / n,
        -alpha * math.sin(phi) + math.sin(a) / n**2,
        -alpha * math.cos(phi) - math.cos(a) / n**3,
    )


def _minimum(alpha, n, phi_ext):
    grid = np.linspace(-math.pi * n, math.pi * n, 120 * n + 1)
    vals = [_asym_potential_derivs(p, alpha, n, phi_ext)[0] for p in grid]
    start = float(grid[int(np.argmin(vals))])
    step = grid[1] - grid[0]
    res = optimize.minimize_scalar(
        lambda p: _asym_potential_derivs(p, alpha, n, phi_ext)[0],
        bounds=(start - 2 * step, start + 2 * step),
        method="bounded",
        options={"xatol": 1e-10},
    )
    p = float(res.x)
    for _ in range(3):  # polish on U'(p) = 0
        _, d1, d2, _, _ = _asym_potential_derivs(p, alpha, n, phi_ext)
        if d2 <= 0 or abs(d1 / d2) > step:
            break
        p -= d1 / d2
    return p


def _coefficients(alpha, n, phi_ext):
    pm = _minimum(alpha, n, phi_ext)
    _, _, d2, d3, d4 = _asym_potential_derivs(pm, alpha, n, phi_ext)
    return pm, d2 / 2, d3 / 6, d4 / 24


def three_wave_search(alpha: float, n: int = 2, points: int = 201) -> List[ThreeWavePoint]:
    """Flux biases where the quartic Taylor coefficient of
    U(phi)/E_J = -alpha cos(phi) - n cos((phi_ext - phi)/n) vanishes.

    The loop holds one junction of energy alpha E_J and n junctions of
    energy E_J in series.  Expansion is about the global minimum.  This is
    an exploratory scan: it brackets sign changes of c4 on a flux grid over
    [0, 2 pi n] and refines each with Brent's method, keeping points with a
    nonzero cubic term and a positive curvature.
    """
    grid = np.linspace(0.0, 2 * math.pi * n, points)
    coeffs = [_coefficients(alpha, n, f) for f in grid]
    c4 = np.array([c[3] for c in coeffs])
    pmin = np.array([c[0] for c in coeffs])
    found = []
    for i in range(points - 1):
        # a jump of the global minimum to another well also flips the sign
        if abs(pmin[i + 1] - pmin[i]) > 0.5:
            continue
        if c4[i] == 0 or np.sign(c4[i]) != np.sign(c4[i + 1]):
            try:
                root = optimize.brentq(lambda f: _coefficients(alpha, n, f)[3], grid[i], grid[i + 1], xtol=1e-13)
            except ValueError:
                continue
            pm, c2, c3, c4r = _coefficients(alpha, n, root)
            if abs(c4r) < 1e-8 and c2 > 0 and abs(c3) > 1e-6:
                found.append(ThreeWavePoint(alpha, root, pm, c2, c3, c4r))
    return found


# ---------------------------------------------------------------------------
# from a netlist


def atom_from_graph(graph: CircuitGraph) -> AtomSpec:
    """Reduce a one-node circuit (junctions, inductors, capacitors to ground)
    to an :class:`AtomSpec`.

    Parallel junctions combine by the phasor sum of E_k exp(i o_k / phi0),
    inductors into a single E_L whose offset shifts phi_ext, and capacitor
    charge offsets into n_g = q_off / 2e.
    """
    model = build_hamiltonian(graph)
    if model.dim != 1:
        raise ValueError(f"atom reduction needs a single non-ground node, got {model.dim}")
    c_sigma = 1.0 / model.inv_cap[0, 0]
    ec = e**2 / (2 * c_sigma)
    k = model.quad_flux[0, 0]
    el = k * phi0**2
    shift = model.linear_flux[0] / k if k > 0 else 0.0  # Wb
    phasor = sum(t.ej * np.exp(1j * t.incidence[0] * t.offset / phi0) for t in model.josephson_terms)
    ej = float(abs(phasor)) if model.josephson_terms else 0.0
    angle = float(np.angle(phasor)) if ej > 0 else 0.0
    phi_ext = angle - shift / phi0 if el > 0 else angle
    n_g = model.offset_charges[0] / (2 * e)
    return AtomSpec(ec, ej, el, float(n_g), float(phi_ext))
