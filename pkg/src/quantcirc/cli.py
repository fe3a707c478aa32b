"""Command-line front end.

Verbs: quantize, spectrum, sweep, bath, fdt, variance, scatter.  Exit codes:
0 success, 1 usage error, 2 validation failure, 3 numerical non-convergence.
Frequencies and energies of circuit modes and levels are printed in Hz
(w / 2 pi and E / h); noise and scattering tables keep the rad/s columns
named in their headers.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from . import atoms, bath, hamlag, inout
from .constants import h, hbar
from .netlist import NetlistError, parse_netlist, parse_value, validate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_NONCONVERGED = 3

SIGNIFICANT_DIGITS = 12


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/((?:\d+\.?\d*|\.\d+)))?$")


def number(text: str) -> float:
    """Parse a float with optional engineering suffix, or a multiple of pi
    such as ``pi``, ``2pi``, ``-pi/2``."""
    text = text.strip()
    match = _PI_RE.match(text)
    if match:
        coeff, div = match.groups()
        c = 1.0 if coeff in ("", "+") else -1.0 if coeff == "-" else float(coeff)
        return c * math.pi / (float(div) if div else 1.0)
    try:
        return parse_value(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def round_sig(obj, digits: int = SIGNIFICANT_DIGITS):
    """Round every float in a nested structure to ``digits`` significant digits."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return obj
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: round_sig(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_sig(v, digits) for v in obj]
    if isinstance(obj, np.generic):
        return round_sig(obj.item(), digits)
    return obj


def _fmt(x: float) -> str:
    return f"{float(x):.{SIGNIFICANT_DIGITS}g}"


def _csv(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(round_sig(obj), indent=2, sort_keys=True) + "\n"


def _load_graph(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read netlist {path!r}: {exc.strerror}") from None
    graph = parse_netlist(text)
    report = validate(graph)
    if not report.ok:
        raise ValidationFailure(str(report))
    return graph


# ---------------------------------------------------------------------------
# verbs


def _atom_block(spec: atoms.AtomSpec) -> dict:
    regime = atoms.classify_regime(spec)
    return {
        "ec_hz": spec.ec / h,
        "ej_hz": spec.ej / h,
        "el_hz": spec.el / h,
        "n_g": spec.n_g,
        "phi_ext": spec.phi_ext,
        "regime": {
            "ej_over_ec": regime.ej_over_ec,
            "el_over_ej_minus_el": regime.el_ratio if math.isfinite(regime.el_ratio) else None,
            "nearest_family": regime.label,
            "exact_cell": regime.exact_cell,
        },
    }


def cmd_quantize(args) -> str:
    graph = _load_graph(args.netlist)
    model = hamlag.build_hamiltonian(graph, linearize=args.linearize)
    modes = hamlag.normal_modes(hamlag.build_matrices(graph, linearize=True))
    out = {
        "hamiltonian": model.to_dict(),
        "modes": {
            "frequencies_hz": (modes.frequencies / (2 * math.pi)).tolist(),
            "count": modes.count,
            "josephson_linearized": bool(model.josephson_terms) or args.linearize,
        },
        "units": {"inv_cap": "1/F", "quad_flux": "1/H", "linear_flux": "A", "offset_charges": "C", "constant": "J",
                  "ej": "J", "offset": "Wb"},
    }
    if model.dim == 1 and model.josephson_terms:
        out["atom"] = _atom_block(atoms.atom_from_graph(graph))
    return _json(out)


def _atom_for(args) -> atoms.AtomSpec:
    graph = _load_graph(args.netlist)
    try:
        return atoms.atom_from_graph(graph)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None


def _converged_levels(spec: atoms.AtomSpec, k: int, size: Optional[int]) -> np.ndarray:
    op = atoms.hamiltonian(spec, size)
    levels = atoms.spectrum(op, k)
    if isinstance(op.basis, atoms.FockBasis):
        ok = op.converged
    else:
        bigger = atoms.spectrum(atoms.charge_basis_hamiltonian(spec, 2 * op.basis.n_cut), k)
        scale = max(np.max(np.abs(bigger)), spec.ec)
        ok = np.max(np.abs(bigger - levels)) <= atoms.CONVERGENCE_TOL * scale
    if not ok:
        raise atoms.ConvergenceError("spectrum not converged at this truncation; raise --size")
    return levels


def cmd_spectrum(args) -> str:
    spec = _atom_for(args)
    levels = _converged_levels(spec, args.levels, args.size) / h
    if args.format == "json":
        return _json({"levels_hz": levels.tolist(), "atom": _atom_block(spec)})
    return _csv([[i, float(v)] for i, v in enumerate(levels)], ["level", "energy_hz"])


def cmd_sweep(args) -> str:
    spec = _atom_for(args)
    if args.points < 1:
        raise ValidationFailure("--points must be at least 1")
    values = np.linspace(args.start, args.stop, args.points) if args.points > 1 else np.array([args.start])

    def point(v):
        s = spec.with_param(args.param, float(v))
        levels = _converged_levels(s, args.levels, args.size) / h
        slope = atoms.sensitivity(s, args.param, (0, 1), args.size) / (2 * math.pi)
        return [float(v), *levels.tolist(), slope]

    if args.workers > 1:
        with ThreadPoolExecutor(args.workers) as pool:
            rows = list(pool.map(point, values))
    else:
        rows = [point(v) for v in values]
    header = ["param_value", *[f"E{i}" for i in range(args.levels)], "d(omega_ge)/dparam"]
    return _csv(rows, header)


def _admittance(args) -> bath.AdmittanceModel:
    if getattr(args, "admittance_csv", None):
        return bath.read_admittance_csv(args.admittance_csv)
    if args.R is None:
        raise UsageError("give --R or --admittance-csv")
    return bath.OhmicAdmittance(args.R, args.wc if args.wc is not None else math.inf)


def cmd_bath(args) -> str:
    model = _admittance(args)
    b = bath.discretize(model, args.delta_omega, args.omega_max)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["L0", "" if b.l0 is None else _fmt(b.l0)])
    w.writerow(["m", "omega_m", "C_m", "L_m"])
    for o in b.oscillators:
        w.writerow([o.m, _fmt(o.omega), _fmt(o.c), _fmt(o.l)])
    return buf.getvalue()


def cmd_fdt(args) -> str:
    model = _admittance(args)
    omega = np.linspace(args.omega_from, args.omega_to, args.points)
    if args.kind == "nyquist":
        values = bath.nyquist_current_psd(model, args.T, omega)
    elif args.kind == "johnson":
        values = bath.johnson_voltage_psd(model, args.T, omega)
    else:
        s_pp, s_vv = bath.quantum_psd(model, args.T, omega)
        values = s_vv if args.kind == "vv" else s_pp
    return _csv([[float(a), float(b)] for a, b in zip(omega, np.atleast_1d(values))], ["omega_rad_s", "S_value"])


def cmd_variance(args) -> str:
    omega0 = 1.0 / math.sqrt(args.L * args.C)
    omega_c = args.wc_ratio * omega0
    phi_c, q_c, params = bath.damped_lc_variance_closed(args.L, args.C, args.R, omega_c, args.T, form=args.form)
    phi_q, q_q = bath.damped_lc_variance_quadrature(args.L, args.C, args.R, omega_c, args.T)
    if args.format == "json":
        return _json({
            "phi2": {"closed": phi_c, "quadrature": phi_q},
            "q2": {"closed": q_c, "quadrature": q_q},
            "theta": params.theta,
            "kappa": params.kappa,
            "wc_ratio": params.wc_ratio,
            "delta": params.delta,
            "form": args.form,
        })
    rows = [
        ["phi2_Wb2", phi_c, phi_q, phi_c / phi_q - 1],
        ["q2_C2", q_c, q_q, q_c / q_q - 1],
    ]
    return _csv(rows, ["quantity", "closed", "quadrature", "relative_difference"])


def cmd_scatter(args) -> str:
    cavity = inout.CavityParams(args.omega_a, args.gamma, args.zeta)
    rows = []
    for det in np.linspace(args.det_from, args.det_to, args.points):
        drive = inout.DriveSpec(args.amplitude, args.omega_a - det)
        a = inout.steady_state(cavity, drive)
        a_out = complex(inout.input_output(args.amplitude, a, cavity))
        rows.append([float(det), a.real, a.imag, a_out.real, a_out.imag])
    return _csv(rows, ["detuning_rad_s", "re_a", "im_a", "re_aout", "im_aout"])


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-o", "--output", help="write to this file instead of stdout")
    common.add_argument("--seed", type=int, default=None,
                        help="reserved; no command uses random numbers")

    parser = _Parser(prog="quantcirc", description="Quantize lumped superconducting circuits.")
    sub = parser.add_subparsers(dest="verb", metavar="VERB")
    sub.required = True

    p = sub.add_parser("quantize", parents=[common], help="netlist -> Hamiltonian and normal modes (JSON)")
    p.add_argument("netlist")
    p.add_argument("--linearize", action="store_true", help="replace junctions by their inductances L_J")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("spectrum", parents=[common], help="lowest levels of a single-node atom")
    p.add_argument("netlist")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--size", type=int, default=None, help="n_cut (charge basis) or n_max (Fock basis)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", parents=[common], help="levels and d(omega_ge)/dparam along a bias sweep (CSV)")
    p.add_argument("netlist")
    p.add_argument("--param", choices=("phi_ext", "n_g"), required=True)
    p.add_argument("--from", dest="start", type=number, required=True)
    p.add_argument("--to", dest="stop", type=number, required=True)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--workers", type=int, default=1, help="threads; output order is preserved")
    p.set_defaults(func=cmd_sweep)

    def admittance_flags(p):
        p.add_argument("--R", type=number, help="resistance (ohm)")
        p.add_argument("--wc", type=number, default=None, help="Drude cutoff (rad/s); default none")
        p.add_argument("--admittance-csv", help="tabulated omega_rad_s,re_Y_S,im_Y_S")

    p = sub.add_parser("bath", parents=[common], help="Caldeira-Leggett discretization (CSV)")
    admittance_flags(p)
    p.add_argument("--delta-omega", type=number, required=True)
    p.add_argument("--omega-max", type=number, required=True)
    p.set_defaults(func=cmd_bath)

    p = sub.add_parser("fdt", parents=[common], help="noise spectral densities (CSV)")
    admittance_flags(p)
    p.add_argument("--T", type=number, required=True, help="temperature (K)")
    p.add_argument("--omega-from", type=number, required=True)
    p.add_argument("--omega-to", type=number, required=True)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--kind", choices=("vv", "phiphi", "nyquist", "johnson"), default="vv")
    p.set_defaults(func=cmd_fdt)

    p = sub.add_parser("variance", parents=[common], help="damped-LC flux and charge variances")
    p.add_argument("--L", type=number, required=True)
    p.add_argument("--C", type=number, required=True)
    p.add_argument("--R", type=number, required=True)
    p.add_argument("--T", type=number, required=True)
    p.add_argument("--wc-ratio", type=number, default=10.0)
    p.add_argument("--form", choices=("exact", "large_cutoff"), default="exact")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("scatter", parents=[common], help="driven cavity reflection vs detuning (CSV)")
    p.add_argument("--omega-a", type=number, required=True)
    p.add_argument("--gamma", type=number, required=True)
    p.add_argument("--zeta", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--amplitude", type=number, default=1.0)
    p.add_argument("--from", dest="det_from", type=number, required=True)
    p.add_argument("--to", dest="det_to", type=number, required=True)
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_scatter)
    return parser


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    """Run the CLI and return its exit code."""
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        text = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (NetlistError, ValidationFailure, bath.PassivityError) as exc:
        sys.stderr.write(f"validation failed:\n{exc}\n")
        return EXIT_INVALID
    except (atoms.ConvergenceError, bath.ConvergenceError) as exc:
        sys.stderr.write(f"did not converge: {exc}\n")
        return EXIT_NONCONVERGED
    except ValueError as exc:
        sys.stderr.write(f"validation failed: {exc}\n")
        return EXIT_INVALID
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:  # pragma: no cover
    raise SystemExit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
