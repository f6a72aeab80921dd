import random

import pytest

from wittjac.poly import SparsePoly


def random_poly(ring, nvars, rng, terms=3, deg=3, coeff=None):
    """Sparse random polynomial with up to `terms` terms of total degree <= deg."""
    out = {}
    for _ in range(terms):
        e = [0] * nvars
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(nvars)] += 1
        c = coeff(rng) if coeff else ring.random(rng)
        out[tuple(e)] = c
    return SparsePoly(ring, nvars, {e: c for e, c in out.items() if c})


@pytest.fixture
def rng():
    return random.Random(20261016)


def random_circuit(ring, nvars, rng, size=10):
    """Random DAG: a few inputs and constants, then add/mul gates."""
    from wittjac.circuit import Circuit, Node
    nodes = [Node("var", j) for j in range(nvars)]
    nodes.append(Node("const", ring.random(rng)))
    while len(nodes) < size:
        op = rng.choice(["add", "mul", "add", "const"])
        if op == "const":
            nodes.append(Node("const", ring.random(rng)))
        else:
            k = len(nodes)
            nodes.append(Node(op, None, rng.randrange(k), rng.randrange(k)))
    return Circuit(ring, nvars, nodes, len(nodes) - 1)


# one PASS/FAIL line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
