"""Node-flux Lagrangian/Hamiltonian assembly and linear normal modes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .constants import phi0
from .netlist import CAPACITOR, INDUCTOR, JOSEPHSON, CircuitGraph, SpanningTree, spanning_tree, validate

__all__ = [
    "CircuitMatrices",
    "HamiltonianModel",
    "IllConditionedError",
    "JosephsonTerm",
    "NormalModes",
    "StepSizeError",
    "Trajectory",
    "build_hamiltonian",
    "build_matrices",
    "normal_modes",
    "simulate_classical",
]

#: relative eigenvalue floor below which a mode is counted as a zero mode
ZERO_MODE_TOL = 1e-12
#: largest acceptable condition number of the reduced capacitance matrix
MAX_CONDITION = 1e12


class IllConditionedError(ValueError):
    """The capacitance matrix is too close to singular to invert reliably."""


class StepSizeError(ValueError):
    """The integrator's energy error exceeded its budget; reduce ``dt``."""


@dataclass(frozen=True)
class CircuitMatrices:
    """Capacitance and inverse-inductance matrices in node variables.

    ``cap`` and ``inv_ind`` are the reduced (ground eliminated) matrices over
    ``node_order``; ``full_cap`` and ``full_inv_ind`` keep every node, in
    ``full_order``, and have zero row sums.
    """

    cap: np.ndarray
    inv_ind: np.ndarray
    node_order: Tuple[str, ...]
    full_cap: np.ndarray
    full_inv_ind: np.ndarray
    full_order: Tuple[str, ...]
    tree: SpanningTree
    linearized: bool = False


def _stamp(mat: np.ndarray, i: int, j: int, g: float) -> None:
    mat[i, i] += g
    mat[j, j] += g
    mat[i, j] -= g
    mat[j, i] -= g


def build_matrices(graph: CircuitGraph, linearize: bool = False) -> CircuitMatrices:
    """Assemble the node capacitance and inverse-inductance matrices.

    Off-diagonal entries are minus the element values joining two nodes,
    diagonals the sum of values incident on the node.  Josephson branches
    are left out of ``inv_ind`` unless ``linearize`` is set, in which case
    each contributes 1/L_J = E_J / phi0^2.
    """
    report = validate(graph)
    if not report.ok:
        raise ValueError(f"graph is not admissible for the method of nodes:\n{report}")
    tree = spanning_tree(graph)
    full_order = tuple(graph.sorted_nodes())
    index = {n: i for i, n in enumerate(full_order)}
    size = len(full_order)
    cap = np.zeros((size, size))
    inv_ind = np.zeros((size, size))
    for b in graph.branches:
        i, j = index[b.node_a], index[b.node_b]
        if b.kind == CAPACITOR:
            _stamp(cap, i, j, b.value)
        elif b.kind == INDUCTOR:
            _stamp(inv_ind, i, j, 1.0 / b.value)
        elif linearize:
            _stamp(inv_ind, i, j, b.value / phi0**2)

    keep = [index[n] for n in graph.non_ground_nodes()]
    reduced = np.ix_(keep, keep)
    return CircuitMatrices(
        cap=cap[reduced].copy(),
        inv_ind=inv_ind[reduced].copy(),
        node_order=tuple(graph.non_ground_nodes()),
        full_cap=cap,
        full_inv_ind=inv_ind,
        full_order=full_order,
        tree=tree,
        linearized=linearize,
    )


@dataclass(frozen=True)
class JosephsonTerm:
    """-E_J cos((incidence . phi + offset) / phi0)."""

    ej: float
    incidence: np.ndarray
    offset: float
    name: str = ""


@dataclass(frozen=True)
class HamiltonianModel:
    """Classical Hamiltonian in node fluxes phi and node charges q.

    H = 1/2 (q - q_off)^T Cinv (q - q_off) + 1/2 phi^T Linv phi
        + linear_flux . phi - sum_J E_J cos((n_J . phi + o_J)/phi0) + constant

    where q_off are ``offset_charges``.  Units are SI throughout.
    """

    inv_cap: np.ndarray
    quad_flux: np.ndarray
    linear_flux: np.ndarray
    josephson_terms: Tuple[JosephsonTerm, ...]
    offset_charges: np.ndarray
    constant: float
    node_order: Tuple[str, ...]

    @property
    def dim(self) -> int:
        return len(self.node_order)

    def kinetic(self, q) -> float:
        dq = np.asarray(q, dtype=float) - self.offset_charges
        return 0.5 * float(dq @ self.inv_cap @ dq)

    def potential(self, phi) -> float:
        phi = np.asarray(phi, dtype=float)
        u = 0.5 * float(phi @ self.quad_flux @ phi) + float(self.linear_flux @ phi) + self.constant
        for t in self.josephson_terms:
            u -= t.ej * np.cos((t.incidence @ phi + t.offset) / phi0)
        return float(u)

    def energy(self, phi, q) -> float:
        return self.kinetic(q) + self.potential(phi)

    def dH_dq(self, q) -> np.ndarray:
        """Node voltages phi_dot = Cinv (q - q_off)."""
        return self.inv_cap @ (np.asarray(q, dtype=float) - self.offset_charges)

    def dH_dphi(self, phi) -> np.ndarray:
        """Gradient of the potential; q_dot = -dH_dphi."""
        phi = np.asarray(phi, dtype=float)
        g = self.quad_flux @ phi + self.linear_flux
        for t in self.josephson_terms:
            g = g + (t.ej / phi0) * np.sin((t.incidence @ phi + t.offset) / phi0) * t.incidence
        return g

    def potential_hessian(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        hess = self.quad_flux.copy()
        for t in self.josephson_terms:
            c = (t.ej / phi0**2) * np.cos((t.incidence @ phi + t.offset) / phi0)
            hess += c * np.outer(t.incidence, t.incidence)
        return hess

    def to_dict(self) -> dict:
        return {
            "node_order": list(self.node_order),
            "inv_cap": self.inv_cap.tolist(),
            "quad_flux": self.quad_flux.tolist(),
            "linear_flux": self.linear_flux.tolist(),
            "josephson_terms": [
                {"name": t.name, "ej": t.ej, "incidence": t.incidence.tolist(), "offset": t.offset}
                for t in self.josephson_terms
            ],
            "offset_charges": self.offset_charges.tolist(),
            "constant": self.constant,
        }


def _cholesky_inverse(cap: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(cap)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError(
            f"capacitance matrix condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}; "
            "check for capacitances differing by many orders of magnitude"
        )
    try:
        factor = linalg.cho_factor(cap, lower=True)
    except linalg.LinAlgError as exc:  # pragma: no cover - validation should prevent this
        raise IllConditionedError(f"capacitance matrix is not positive definite: {exc}") from None
    inv = linalg.cho_solve(factor, np.eye(cap.shape[0]))
    return 0.5 * (inv + inv.T)


def build_hamiltonian(
    graph: CircuitGraph, tree: Optional[SpanningTree] = None, linearize: bool = False
) -> HamiltonianModel:
    """Hamiltonian of ``graph`` in the node fluxes of its spanning tree.

    Every branch flux is phi[node_a] - phi[node_b] + offset with phi[ground]
    = 0.  Inductor offsets expand into a linear coupling (phi_a - phi_b)
    offset/L and a constant offset^2/2L; capacitor charge offsets shift the
    node charges; Josephson branches keep their offset inside the cosine.
    With ``linearize`` the junctions are replaced by inductors
    L_J = phi0^2 / E_J carrying the same offset.

    Raises
    ------
    IllConditionedError
        If the capacitance matrix has a condition number above 1e12.
    """
    mats = build_matrices(graph, linearize=linearize)
    if tree is None:
        tree = mats.tree
    if tree.ground != graph.ground:
        raise ValueError(f"tree is rooted at {tree.ground!r} but the graph ground is {graph.ground!r}")
    order = mats.node_order
    index = {n: i for i, n in enumerate(order)}
    dim = len(order)

    def incidence(a: str, b: str) -> np.ndarray:
        v = np.zeros(dim)
        if a in index:
            v[index[a]] += 1.0
        if b in index:
            v[index[b]] -= 1.0
        return v

    linear = np.zeros(dim)
    q_off = np.zeros(dim)
    constant = 0.0
    terms: List[JosephsonTerm] = []
    for b in graph.branches:
        inc = incidence(b.node_a, b.node_b)
        if b.kind == CAPACITOR:
            q_off += b.offset * inc
        elif b.kind == INDUCTOR or linearize:
            inv_l = 1.0 / b.value if b.kind == INDUCTOR else b.value / phi0**2
            linear += inv_l * b.offset * inc
            constant += 0.5 * inv_l * b.offset**2
        else:
            terms.append(JosephsonTerm(b.value, inc, b.offset, b.name))

    return HamiltonianModel(
        inv_cap=_cholesky_inverse(mats.cap),
        quad_flux=mats.inv_ind,
        linear_flux=linear,
        josephson_terms=tuple(terms),
        offset_charges=q_off,
        constant=constant,
        node_order=order,
    )


@dataclass(frozen=True)
class NormalModes:
    """Generalized eigenmodes of inv_ind v = w^2 cap v.

    ``frequencies`` holds every eigenfrequency in ascending order, zero
    modes included (as exact zeros); ``count`` is the number M of nonzero
    modes.  Mode vectors are the matching columns, cap-normalized.
    """

    frequencies: np.ndarray
    mode_vectors: np.ndarray
    count: int
    node_order: Tuple[str, ...] = ()

    @property
    def nonzero(self) -> np.ndarray:
        return self.frequencies[len(self.frequencies) - self.count :]


def normal_modes(mats: CircuitMatrices) -> NormalModes:
    """Normal modes of the linear part of the circuit."""
    w2, vecs = linalg.eigh(mats.inv_ind, mats.cap)
    top = max(float(np.max(np.abs(w2))), 0.0) if w2.size else 0.0
    zero = w2 < ZERO_MODE_TOL * top if top > 0 else np.ones_like(w2, dtype=bool)
    freqs = np.where(zero, 0.0, np.sqrt(np.clip(w2, 0.0, None)))
    order = np.argsort(freqs, kind="stable")
    return NormalModes(freqs[order], vecs[:, order], int(np.count_nonzero(~zero)), mats.node_order)


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    phi: np.ndarray  # shape (steps + 1, dim)
    q: np.ndarray
    energy: np.ndarray


def _max_frequency(model: HamiltonianModel, phi) -> float:
    hess = model.potential_hessian(phi)
    if not np.any(hess):
        return 0.0
    w2 = np.linalg.eigvals(model.inv_cap @ hess)
    return float(np.sqrt(np.max(np.abs(w2))))


def simulate_classical(
    model: HamiltonianModel,
    initial: Tuple[Sequence[float], Sequence[float]],
    dt: float,
    steps: int,
    check_energy: bool = True,
) -> Trajectory:
    """Integrate Hamilton's equations with the leapfrog (Stormer-Verlet) scheme.

    phi_dot = dH/dq and q_dot = -dH/dphi.  The scheme is symplectic, so the
    energy error stays bounded; it scales as (w dt)^2.

    Raises
    ------
    StepSizeError
        When ``check_energy`` is set and the largest relative energy error
        exceeds 1e-6 times the number of periods of the fastest linearized
        mode (at least one period).
    """
    phi = np.array(initial[0], dtype=float).reshape(model.dim)
    q = np.array(initial[1], dtype=float).reshape(model.dim)
    ts = dt * np.arange(steps + 1)
    phis = np.empty((steps + 1, model.dim))
    qs = np.empty((steps + 1, model.dim))
    energies = np.empty(steps + 1)
    phis[0], qs[0], energies[0] = phi, q, model.energy(phi, q)
    force = model.dH_dphi(phi)
    for n in range(1, steps + 1):
        q_half = q - 0.5 * dt * force
        phi = phi + dt * model.dH_dq(q_half)
        force = model.dH_dphi(phi)
        q = q_half - 0.5 * dt * force
        phis[n], qs[n], energies[n] = phi, q, model.energy(phi, q)

    if check_energy:
        scale = max(abs(energies[0]), np.max(np.abs(energies)), np.finfo(float).tiny)
        error = float(np.max(np.abs(energies - energies[0]))) / scale
        w_max = _max_frequency(model, phis[0])
        periods = max(1.0, ts[-1] * w_max / (2 * np.pi))
        if error > 1e-6 * periods:
            raise StepSizeError(
                f"relative energy error {error:.3g} over {periods:.3g} periods exceeds the 1e-6 per period "
                f"budget; w_max dt = {w_max * dt:.3g}"
            )
    return Trajectory(ts, phis, qs, energies)
