"""Textual netlists, circuit graphs and the capacitive spanning tree.

A netlist is line oriented::

    # comment
    C1 0 1 10p
    L1 0 1 1n offset=0
    J1 1 2 f=5G offset=1e-16
    GROUND 0

The first letter of the element name selects the kind (``C`` capacitor,
``L`` linear inductor, ``J`` Josephson element).  Values are SI floats with
an optional engineering suffix.  Josephson values are energies; they may be
given as ``Ej=<joules>`` or ``f=<hertz>`` (meaning E_J / h).

Branch orientation runs from ``node_a`` to ``node_b``: the branch flux is
``phi[node_a] - phi[node_b] + offset`` for inductive kinds, and a capacitor
with charge offset stores ``(Q - offset)**2 / 2C``.  Only the sum of
inductive offsets around a loop is observable, so an external loop flux is
expressed by putting the whole loop offset on one branch of the loop.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .constants import h

__all__ = [
    "CAPACITOR",
    "INDUCTOR",
    "JOSEPHSON",
    "Branch",
    "CircuitGraph",
    "NetlistError",
    "NodeClassification",
    "SpanningTree",
    "ValidationReport",
    "Violation",
    "classify_nodes",
    "parse_netlist",
    "parse_value",
    "render_netlist",
    "spanning_tree",
    "validate",
]

CAPACITOR = "capacitor"
INDUCTOR = "inductor"
JOSEPHSON = "josephson"

_KIND_BY_PREFIX = {"C": CAPACITOR, "L": INDUCTOR, "J": JOSEPHSON}
_PREFIX_BY_KIND = {v: k for k, v in _KIND_BY_PREFIX.items()}

_SUFFIXES = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
}

_NUMBER_RE = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf|[+-]?nan)([a-zA-Z]?)$"
)


class NetlistError(ValueError):
    """Raised for malformed netlist text."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def parse_value(text: str) -> float:
    """Parse ``'10p'``, ``'1e-9'``, ``'5G'`` ... into a float.

    Suffixes are case sensitive (``m`` is milli, ``M`` is mega).
    """
    match = _NUMBER_RE.match(text.strip())
    if match is None:
        raise ValueError(f"cannot parse value {text!r}")
    number, suffix = match.groups()
    if suffix and suffix not in _SUFFIXES:
        raise ValueError(f"unknown engineering suffix {suffix!r} in {text!r}")
    value = float(number)
    return value * _SUFFIXES[suffix] if suffix else value


@dataclass(frozen=True)
class Branch:
    """A two-pole element between ``node_a`` and ``node_b``.

    ``value`` is in farads (capacitor), henries (inductor) or joules of E_J
    (Josephson).  ``offset`` is the charge offset in coulombs for capacitors
    and the branch flux offset in webers for inductive kinds.
    """

    name: str
    kind: str
    node_a: str
    node_b: str
    value: float
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in (CAPACITOR, INDUCTOR, JOSEPHSON):
            raise ValueError(f"unknown element kind {self.kind!r}")
        if not self.value > 0:
            raise ValueError(f"branch {self.name}: value must be positive, got {self.value}")
        if self.node_a == self.node_b:
            raise ValueError(f"branch {self.name}: both terminals on node {self.node_a}")

    @property
    def inductive(self) -> bool:
        return self.kind != CAPACITOR

    def other(self, node: str) -> str:
        return self.node_b if node == self.node_a else self.node_a


@dataclass(frozen=True)
class CircuitGraph:
    """Parsed circuit: node set, ordered branches and the ground node."""

    nodes: frozenset
    branches: Tuple[Branch, ...]
    ground: str = "0"

    @classmethod
    def from_branches(cls, branches: Iterable[Branch], ground: str = "0") -> "CircuitGraph":
        branches = tuple(branches)
        nodes = set()
        names = set()
        for b in branches:
            if b.name in names:
                raise ValueError(f"duplicate branch name {b.name!r}")
            names.add(b.name)
            nodes.update((b.node_a, b.node_b))
        return cls(frozenset(nodes), branches, ground)

    def branch(self, name: str) -> Branch:
        for b in self.branches:
            if b.name == name:
                return b
        raise KeyError(name)

    def of_kind(self, *kinds: str) -> List[Branch]:
        return [b for b in self.branches if b.kind in kinds]

    def sorted_nodes(self) -> List[str]:
        return sorted(self.nodes)

    def non_ground_nodes(self) -> List[str]:
        """Non-ground nodes in lexicographic order (the node-flux ordering)."""
        return [n for n in sorted(self.nodes) if n != self.ground]

    def with_ground(self, ground: str) -> "CircuitGraph":
        return CircuitGraph(self.nodes, self.branches, ground)


def _parse_branch(tokens: List[str], lineno: int) -> Branch:
    name = tokens[0]
    kind = _KIND_BY_PREFIX.get(name[0].upper())
    if kind is None:
        raise NetlistError(f"unknown element kind for {name!r}", lineno)
    if len(tokens) < 4:
        raise NetlistError(f"expected '<name> <nodeA> <nodeB> <value>', got {' '.join(tokens)!r}", lineno)
    node_a, node_b, raw_value = tokens[1:4]

    value = None
    offset = 0.0
    fields = [raw_value] + tokens[4:]
    for i, tok in enumerate(fields):
        key, sep, rest = tok.partition("=")
        try:
            if not sep:
                if i != 0:
                    raise NetlistError(f"unexpected token {tok!r}", lineno)
                value = parse_value(tok)
            elif key.lower() == "offset":
                offset = parse_value(rest)
            elif key.lower() == "ej" and kind == JOSEPHSON and i == 0:
                value = parse_value(rest)
            elif key.lower() == "f" and kind == JOSEPHSON and i == 0:
                value = parse_value(rest) * h
            else:
                raise NetlistError(f"unexpected field {tok!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, NetlistError):
                raise
            raise NetlistError(str(exc), lineno) from None
    if value is None:
        raise NetlistError(f"missing value for {name}", lineno)
    if not value > 0:
        raise NetlistError(f"nonpositive value for {name}: {value}", lineno)
    if node_a == node_b:
        raise NetlistError(f"{name} connects node {node_a} to itself", lineno)
    return Branch(name, kind, node_a, node_b, value, offset)


def parse_netlist(text: str) -> CircuitGraph:
    """Parse netlist text into a :class:`CircuitGraph`.

    Raises
    ------
    NetlistError
        On syntax errors (with the offending line number), duplicate branch
        names, nonpositive values, unknown element kinds or an empty netlist.
    """
    branches: List[Branch] = []
    seen: Dict[str, int] = {}
    ground = "0"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0].upper() == "GROUND":
            if len(tokens) != 2:
                raise NetlistError("GROUND takes exactly one node", lineno)
            ground = tokens[1]
            continue
        branch = _parse_branch(tokens, lineno)
        if branch.name in seen:
            raise NetlistError(
                f"duplicate branch name {branch.name!r} (first on line {seen[branch.name]})", lineno
            )
        seen[branch.name] = lineno
        branches.append(branch)
    if not branches:
        raise NetlistError("empty netlist has no branches")
    return CircuitGraph.from_branches(branches, ground)


def render_netlist(graph: CircuitGraph) -> str:
    """Render a graph back to netlist text; ``parse_netlist`` inverts it exactly."""
    lines = []
    for b in graph.branches:
        value = f"Ej={b.value!r}" if b.kind == JOSEPHSON else repr(b.value)
        line = f"{b.name} {b.node_a} {b.node_b} {value}"
        if b.offset != 0.0:
            line += f" offset={b.offset!r}"
        lines.append(line)
    lines.append(f"GROUND {graph.ground}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self):
        return f"{self.code}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    """Violations of the method-of-nodes admissibility rules; empty means valid."""

    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def __bool__(self):
        return bool(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


def _components(nodes: Iterable[str], branches: Iterable[Branch]) -> List[set]:
    adj: Dict[str, set] = {n: set() for n in nodes}
    for b in branches:
        adj[b.node_a].add(b.node_b)
        adj[b.node_b].add(b.node_a)
    seen = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            n = stack.pop()
            for m in adj[n]:
                if m not in comp:
                    comp.add(m)
                    stack.append(m)
        seen |= comp
        comps.append(comp)
    return comps


def validate(graph: CircuitGraph) -> ValidationReport:
    """Check that ``graph`` is admissible for the method of nodes.

    The checks are: the ground is a node of the graph, the graph is
    connected, the capacitor-only sub-network spans every node and is
    connected, and every node touched by an inductive branch also touches
    a capacitor.
    """
    out: List[Violation] = []
    if graph.ground not in graph.nodes:
        out.append(Violation("ground missing", f"ground node {graph.ground!r} is not in the graph"))
    if len(_components(graph.nodes, graph.branches)) > 1:
        out.append(Violation("graph not connected", "the circuit has several disconnected parts"))

    caps = graph.of_kind(CAPACITOR)
    cap_comps = _components(graph.nodes, caps)
    if len(cap_comps) > 1:
        detail = " | ".join(",".join(sorted(c)) for c in cap_comps)
        out.append(
            Violation(
                "capacitive sub-network not spanning",
                f"nodes not joined by a capacitive path: {detail}",
            )
        )

    cap_nodes = {n for b in caps for n in (b.node_a, b.node_b)}
    ind_nodes = {n for b in graph.of_kind(INDUCTOR, JOSEPHSON) for n in (b.node_a, b.node_b)}
    for n in sorted(ind_nodes - cap_nodes):
        out.append(Violation("passive inductive node", f"node {n!r} touches only inductive branches"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class SpanningTree:
    """Capacitive spanning tree rooted at ground.

    ``parent`` maps every non-ground node to ``(parent_node, branch_name)``.
    """

    ground: str
    tree_branches: Tuple[str, ...]
    parent: Dict[str, Tuple[str, str]] = field(hash=False)
    closure_branches: Tuple[str, ...] = ()

    def path_to_ground(self, node: str) -> List[str]:
        """Branch names on the unique tree path from ``node`` down to ground."""
        path = []
        while node != self.ground:
            node, name = self.parent[node]
            path.append(name)
        return path


def spanning_tree(graph: CircuitGraph) -> SpanningTree:
    """Breadth-first capacitive spanning tree from ground.

    Neighbours are explored in lexicographic node-id order; parallel
    capacitors between the same pair are tie-broken by branch name, so the
    result is fully deterministic.
    """
    report = validate(graph)
    if not report.ok:
        raise ValueError(f"graph is not admissible for the method of nodes:\n{report}")

    adj: Dict[str, List[Tuple[str, str]]] = {n: [] for n in graph.nodes}
    for b in graph.of_kind(CAPACITOR):
        adj[b.node_a].append((b.node_b, b.name))
        adj[b.node_b].append((b.node_a, b.name))
    for n in adj:
        adj[n].sort()

    parent: Dict[str, Tuple[str, str]] = {}
    tree: List[str] = []
    visited = {graph.ground}
    queue = deque([graph.ground])
    while queue:
        n = queue.popleft()
        for m, name in adj[n]:
            if m in visited:
                continue
            visited.add(m)
            parent[m] = (n, name)
            tree.append(name)
            queue.append(m)

    tree_set = set(tree)
    closure = tuple(b.name for b in graph.branches if b.name not in tree_set)
    return SpanningTree(graph.ground, tuple(tree), parent, closure)


@dataclass(frozen=True)
class NodeClassification:
    active: frozenset
    passive: frozenset
    ground: str


def classify_nodes(graph: CircuitGraph) -> NodeClassification:
    """Split non-ground nodes into active (inductive and capacitive branches
    meet) and passive (a single element kind) nodes."""
    cap_nodes = set()
    ind_nodes = set()
    for b in graph.branches:
        target = ind_nodes if b.inductive else cap_nodes
        target.update((b.node_a, b.node_b))
    active = frozenset(n for n in graph.nodes if n != graph.ground and n in cap_nodes and n in ind_nodes)
    passive = frozenset(n for n in graph.nodes if n != graph.ground and n not in active)
    return NodeClassification(active, passive, graph.ground)
