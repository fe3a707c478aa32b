import numpy as np
import pytest
from hypothesis import strategies as st

from quantcirc.netlist import CAPACITOR, INDUCTOR, JOSEPHSON, Branch, CircuitGraph


def random_linear_circuit(rng: np.random.Generator, n_nodes: int, extra: int = 3) -> CircuitGraph:
    """Connected circuit on nodes '0'..str(n_nodes-1): a random capacitive
    tree, extra capacitors, and inductors on random pairs."""
    nodes = [str(i) for i in range(n_nodes)]
    branches = []
    for i in range(1, n_nodes):
        j = int(rng.integers(0, i))
        branches.append(Branch(f"CT{i}", CAPACITOR, nodes[j], nodes[i], float(rng.uniform(0.5, 5.0)) * 1e-12))
    for k in range(extra):
        a, b = rng.choice(n_nodes, size=2, replace=False)
        branches.append(Branch(f"CX{k}", CAPACITOR, nodes[a], nodes[b], float(rng.uniform(0.1, 3.0)) * 1e-12))
    for k in range(n_nodes + extra):
        a, b = rng.choice(n_nodes, size=2, replace=False)
        branches.append(Branch(f"L{k}", INDUCTOR, nodes[a], nodes[b], float(rng.uniform(0.5, 20.0)) * 1e-9))
    return CircuitGraph.from_branches(branches, "0")


@st.composite
def capacitive_graphs(draw, max_nodes: int = 7):
    """Random valid graphs: spanning capacitor tree plus extra elements."""
    n = draw(st.integers(min_value=2, max_value=max_nodes))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    extra = draw(st.integers(min_value=0, max_value=4))
    return random_linear_circuit(np.random.default_rng(seed), n, extra)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record a PASS/FAIL line for an acceptance criterion and assert it.

    Lines are echoed immediately (visible with ``-s``) and repeated in the
    terminal summary so a plain ``pytest`` run shows them too.
    """

    def record(number: int, ok: bool, detail: str, elapsed: float, limit: float):
        fast = elapsed < limit
        status = "PASS" if ok and fast else "FAIL"
        line = f"criterion {number:2d}: {status}  {detail}  [{elapsed:.3f} s, limit {limit:g} s]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
        assert fast, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
