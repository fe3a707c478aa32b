"""End-to-end acceptance checks, one test per criterion.

Each test times its own computation and records a PASS/FAIL line through
the ``verdict`` fixture; the lines are gathered in the terminal summary.
"""

import cmath
import math
import time

import numpy as np
import pytest

from conftest import random_linear_circuit
from quantcirc.atoms import (
    AtomSpec,
    array_reduce,
    hamiltonian,
    sensitivity,
    spectrum,
    squid_reduce,
    transition_frequency,
)
from quantcirc.bath import (
    OhmicAdmittance,
    damped_lc_variance_closed,
    damped_lc_variance_quadrature,
    discretize,
    quantum_psd,
    reconstruct,
)
from quantcirc.constants import h, hbar, k_B, phi0
from quantcirc.hamlag import build_hamiltonian, build_matrices, normal_modes
from quantcirc.inout import PARALLEL, CavityParams, DriveSpec, damping_rate, input_output, steady_state
from quantcirc.netlist import parse_netlist

EC = h * 1e9


def _lc_circuit(kappa, theta, wc_ratio, L=1e-9, C=10e-12):
    w0 = 1 / math.sqrt(L * C)
    return L, C, 1 / (2 * kappa * C * w0), wc_ratio * w0, theta * hbar * w0 / k_B


def test_criterion_01_lc_example(verdict):
    t0 = time.perf_counter()
    graph = parse_netlist("C1 0 1 10p\nL1 0 1 1n\n")
    mats = build_matrices(graph)
    f0 = normal_modes(mats).frequencies[0] / (2 * math.pi)
    z0 = math.sqrt((1 / mats.inv_ind[0, 0]) / mats.cap[0, 0])
    elapsed = time.perf_counter() - t0
    ok = abs(f0 / 1.5915e9 - 1) < 1e-4 and z0 == 10.0
    verdict(1, ok, f"f0 = {f0:.6e} Hz, Z0 = {z0!r} ohm", elapsed, 0.1)


def test_criterion_02_coupled_pair_hamiltonian(verdict):
    rng = np.random.default_rng(2)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(3):
        c1, c2, c3 = (float(v) for v in rng.uniform(0.1, 5.0, 3) * 1e-12)
        l1, l2, l3 = (float(v) for v in rng.uniform(0.5, 10.0, 3) * 1e-9)
        flux = float(rng.uniform(-1, 1)) * phi0
        graph = parse_netlist(
            f"C1 a 0 {c1!r}\nL1 a 0 {l1!r}\nC2 b 0 {c2!r}\nL2 b 0 {l2!r}\n"
            f"C3 a b {c3!r}\nL3 a b {l3!r} offset={flux!r}\n"
        )
        model = build_hamiltonian(graph)
        det = c1 * c2 + c1 * c3 + c2 * c3
        expected = {
            "inv_cap": np.array([[c2 + c3, c3], [c3, c1 + c3]]) / det,
            "quad_flux": np.array([[1 / l1 + 1 / l3, -1 / l3], [-1 / l3, 1 / l2 + 1 / l3]]),
            "linear_flux": np.array([flux / l3, -flux / l3]),
            "constant": np.array(flux**2 / (2 * l3)),
        }
        for key, want in expected.items():
            got = np.asarray(getattr(model, key))
            worst = max(worst, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
        # the energy itself, written out term by term
        qa, qb, pa, pb = rng.normal(size=4) * np.array([1e-19, 1e-19, 1e-16, 1e-16])
        energy = (
            ((c2 + c3) * qa**2 + (c1 + c3) * qb**2 + 2 * c3 * qa * qb) / (2 * det)
            + pa**2 / (2 * l1) + pb**2 / (2 * l2) + (pa - pb + flux) ** 2 / (2 * l3)
        )
        worst = max(worst, abs(model.energy([pa, pb], [qa, qb]) / energy - 1))
    elapsed = time.perf_counter() - t0
    verdict(2, worst < 1e-12, f"largest relative coefficient error {worst:.2e}", elapsed, 0.1)


def test_criterion_03_closed_form_vs_quadrature(verdict):
    worst = 0.0
    t0 = time.perf_counter()
    for kappa in (0.3, 2.0, 5.0, 50.0):
        for theta in (0.0, 1e-4, 0.1, 1.0):
            args = _lc_circuit(kappa, theta, 10.0)
            phi_c, q_c, _ = damped_lc_variance_closed(*args)
            phi_q, q_q = damped_lc_variance_quadrature(*args)
            worst = max(worst, abs(phi_c / phi_q - 1), abs(q_c / q_q - 1))
    elapsed = time.perf_counter() - t0
    verdict(3, worst < 5e-3, f"largest relative difference {worst:.2e} (tolerance 5e-3)", elapsed, 10.0)


def test_criterion_04_asymptotics(verdict):
    t0 = time.perf_counter()
    # low-temperature flux variance, reduced units <Phi^2> / hbar Z0
    lt_err = 0.0
    for kappa in (0.3, 2.0, 5.0, 50.0):
        s = cmath.sqrt(kappa * kappa - 1)
        target = (cmath.log(kappa + s) / (math.pi * s)).real
        for form, wc in (("large_cutoff", 1e4), ("exact", 1e6)):
            phi2, _, p = damped_lc_variance_closed(*_lc_circuit(kappa, 1e-4, wc), form=form)
            lt_err = max(lt_err, abs(phi2 / (hbar * p.z0) / target - 1))
    # strong damping, in units of hbar Z0 / 2
    phi2, _, p = damped_lc_variance_closed(*_lc_circuit(50.0, 0.0, 1e6))
    strong_gap = abs(phi2 / (hbar * p.z0 / 2) - 2 * math.log(100.0) / (math.pi * 50.0))
    strong_bound = math.log(50.0) / 50.0**3
    # slope of <Q^2> against ln w_c, in units of (hbar / 2 Z0) 4 kappa / pi
    slope_err = 0.0
    for kappa, form, grid in (
        (0.1, "large_cutoff", (10.0, 100.0, 1000.0)),
        (0.3, "large_cutoff", (10.0, 100.0, 1000.0)),
        (0.1, "exact", (1e3, 1e4, 1e5)),
        (0.3, "exact", (1e3, 1e4, 1e5)),
        (1.0, "exact", (1e3, 1e4, 1e5)),
        (2.0, "exact", (1e3, 1e4, 1e5)),
    ):
        theta = 1e-4 if form == "large_cutoff" else 0.0
        q2 = []
        for wc in grid:
            _, q, p = damped_lc_variance_closed(*_lc_circuit(kappa, theta, wc), form=form)
            q2.append(q / (hbar / (2 * p.z0)))
        slope = np.polyfit(np.log(grid), q2, 1)[0]
        slope_err = max(slope_err, abs(slope / (4 * kappa / math.pi) - 1))
    elapsed = time.perf_counter() - t0
    ok = lt_err < 1e-3 and strong_gap <= strong_bound and slope_err < 0.02
    detail = (
        f"low-T flux {lt_err:.1e} (tol 1e-3); strong damping gap {strong_gap:.1e} <= {strong_bound:.1e}; "
        f"charge slope {slope_err:.1e} (tol 2e-2)"
    )
    verdict(4, ok, detail, elapsed, 5.0)


def test_criterion_05_quantum_fdt(verdict):
    z = OhmicAdmittance(50.0)
    t0 = time.perf_counter()
    T = 0.05
    unit = k_B * T / hbar
    rows = []
    s = quantum_psd(z, T, 1e-3 * unit)[1]
    rows.append(abs(s / (2 * k_B * T * 50.0) - 1))
    s = quantum_psd(z, T, 1e3 * unit)[1]
    rows.append(abs(s / (2 * hbar * 1e3 * unit * 50.0) - 1))
    s_neg = quantum_psd(z, T, -1e3 * unit)[1]
    rows.append(abs(s_neg) / (2 * hbar * 1e3 * unit * 50.0))
    rng = np.random.default_rng(5)
    balance = 0.0
    for _ in range(100):
        # ratios hbar w / k_B T up to 30 keep exp(-beta hbar w) well inside double range
        temp = 10 ** rng.uniform(-3, 1)
        w = 10 ** rng.uniform(-3, math.log10(30)) * k_B * temp / hbar
        pos = quantum_psd(z, temp, w)[1]
        neg = quantum_psd(z, temp, -w)[1]
        balance = max(balance, abs(neg / (math.exp(-hbar * w / (k_B * temp)) * pos) - 1))
    elapsed = time.perf_counter() - t0
    ok = max(rows) <= 0.01 and balance <= 1e-10
    verdict(5, ok, f"limit rows {', '.join(f'{r:.1e}' for r in rows)}; detailed balance {balance:.1e}", elapsed, 1.0)


def test_criterion_06_caldeira_leggett_round_trip(verdict):
    R, dw = 50.0, 1e8
    t0 = time.perf_counter()
    bath = discretize(OhmicAdmittance(R), dw, 2e10)
    # the comb ends at 0 and omega_max; stay 20 broadening widths clear of both
    omega = np.linspace(0.4e10, 1.6e10, 400)
    rec = reconstruct(bath, omega, 2 * dw)
    band_err = float(np.max(np.abs(rec.real * R - 1)))
    ls = np.array([o.l for o in bath.oscillators])
    spread = float(np.max(np.abs(ls / ls[0] - 1)))
    elapsed = time.perf_counter() - t0
    ok = band_err < 0.05 and spread <= 1e-12
    verdict(6, ok, f"interior Re Y error {band_err:.2e}; l_m spread {spread:.1e}", elapsed, 1.0)


def test_criterion_07_squid_reduction(verdict):
    phi = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    worst = 0.0
    frustrated = None
    t0 = time.perf_counter()
    for ej1, ej2 in ((1.0, 1.0), (1.0, 2.0), (0.4, 3.0)):
        for flux in np.linspace(0, 2 * math.pi * phi0, 100):
            x = flux / (2 * phi0)
            amplitude = abs(np.fft.rfft(-ej1 * np.cos(phi + x) - ej2 * np.cos(phi - x))[1]) * 2 / len(phi)
            worst = max(worst, abs(squid_reduce(ej1, ej2, flux).ej_eff - amplitude))
    frustrated = squid_reduce(1.0, 1.0, math.pi * phi0).ej_eff
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and frustrated <= 1e-10
    verdict(7, ok, f"amplitude error {worst:.1e}; symmetric pair at half flux quantum {frustrated:.1e}", elapsed, 1.0)


def test_criterion_08_array_limit(verdict):
    ej = EC
    phi = np.linspace(-1, 1, 401)
    ok = True
    t0 = time.perf_counter()
    for M in (10, 100):
        arr = array_reduce(ej, M)
        exact = -M * ej * np.cos(phi / M)
        quad = -M * ej + ej / (2 * M) * phi**2
        # both sides are of size M E_J, so their difference carries that much rounding
        rounding = 4 * np.finfo(float).eps * M * ej
        ok &= bool(np.all(np.abs(exact - quad) <= ej * phi**4 / (24 * M**3) + rounding))
        ok &= arr.l_eff == M * (phi0**2 / ej)
    elapsed = time.perf_counter() - t0
    verdict(8, ok, "quartic bound holds and l_eff = M L_J for M in {10, 100}", elapsed, 0.1)


def test_criterion_09_atom_spectra(verdict):
    t0 = time.perf_counter()
    cpb = AtomSpec(EC, 0.1 * EC, n_g=0.5)
    cpb_err = abs(transition_frequency(cpb) * hbar / cpb.ej - 1)
    transmon = AtomSpec(EC, 50 * EC)
    approx = (math.sqrt(8 * transmon.ej * transmon.ec) - transmon.ec) / hbar
    transmon_err = abs(transition_frequency(transmon) / approx - 1)
    widths = [
        abs(transition_frequency(AtomSpec(EC, r * EC, n_g=0.5)) - transition_frequency(AtomSpec(EC, r * EC)))
        for r in (10, 20, 50)
    ]
    decreasing = widths[0] > widths[1] > widths[2]
    flux_sens = 0.0
    for phi_ext in (0.0, math.pi):
        spec = AtomSpec(EC, 4 * EC, EC, phi_ext=phi_ext)
        flux_sens = max(flux_sens, abs(sensitivity(spec, "phi_ext")) / transition_frequency(spec))
    doubling = 0.0
    for spec in (cpb, transmon, *(AtomSpec(EC, 4 * EC, EC, phi_ext=p) for p in (0.0, math.pi))):
        size = 30 if spec.el == 0 else 60
        a = spectrum(hamiltonian(spec, size), 4)
        b = spectrum(hamiltonian(spec, 2 * size), 4)
        doubling = max(doubling, float(np.max(np.abs(a - b) / np.abs(b))))
    elapsed = time.perf_counter() - t0
    ok = cpb_err < 0.01 and transmon_err < 0.02 and decreasing and flux_sens < 1e-8 and doubling <= 1e-9
    detail = (
        f"CPB {cpb_err:.1e}; transmon {transmon_err:.1e}; dispersion decreasing {decreasing}; "
        f"sweet spots {flux_sens:.1e}; truncation doubling {doubling:.1e}"
    )
    verdict(9, ok, detail, elapsed, 30.0)


def test_criterion_10_input_output(verdict):
    t0 = time.perf_counter()
    cav = CavityParams(2 * math.pi * 6e9, 2 * math.pi * 2e6)
    b_in = 0.7 - 0.4j
    worst = 0.0
    for det in np.linspace(-30, 30, 200) * cav.gamma_a:
        a = steady_state(cav, DriveSpec(b_in, cav.omega_a - det))
        worst = max(worst, abs(abs(input_output(b_in, a, cav)) - abs(b_in)))
    omega = 1 / math.sqrt(1e-9 * 10e-12)
    q = omega / damping_rate(omega, 10.0, 100.0, PARALLEL)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-12 and abs(q - 10.0) < 1e-12
    verdict(10, ok, f"unitarity defect {worst:.1e}; loaded Q = {q!r}", elapsed, 0.5)


def test_criterion_11_gauge_invariance(verdict):
    rng = np.random.default_rng(11)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(20):
        n = int(rng.integers(3, 8))
        graph = random_linear_circuit(rng, n, int(rng.integers(0, 4)))
        other = graph.with_ground(str(int(rng.integers(1, n))))
        a = normal_modes(build_matrices(graph))
        b = normal_modes(build_matrices(other))
        assert a.count == b.count
        worst = max(worst, float(np.max(np.abs(a.nonzero - b.nonzero) / a.nonzero)))
    elapsed = time.perf_counter() - t0
    verdict(11, worst <= 1e-10, f"largest relative mode shift {worst:.1e} over 20 circuits", elapsed, 5.0)
