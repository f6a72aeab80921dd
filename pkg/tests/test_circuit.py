import random

import pytest

from conftest import random_circuit
from wittjac.circuit import (Circuit, CircuitBuilder, CircuitError, Node, circuit_eval, circuit_from_poly,
                             degree_bound, derivative_circuit, parse_circuit, to_sparse_poly)
from wittjac.poly import TermCapExceeded, evaluate_at, parse_poly, partial_derivative
from wittjac.rings import fq_context, gr_context

F3 = fq_context(3, 1)
F9 = fq_context(3, 2)
Z9 = gr_context(F3, 2)


def test_constant_circuit():
    C = Circuit(F3, 2, [Node("const", F3.from_int(2))], 0)
    assert circuit_eval(C, [F3.one, F3.one]) == F3.from_int(2)
    assert degree_bound(C) == 0


def test_eval_example():
    b = CircuitBuilder(F3, 2)
    x1, x2 = b.var(0), b.var(1)
    C = b.build(b.add(b.mul(x1, x1), x2))
    assert C([F3.from_int(2), F3.one]) == F3.from_int(2)


def test_eval_matches_expansion():
    rng = random.Random(1)
    for _ in range(100):
        C = random_circuit(F9, 3, rng, 12)
        f = to_sparse_poly(C)
        pt = [F9.random(rng) for _ in range(3)]
        assert circuit_eval(C, pt) == evaluate_at(f, pt)
        assert degree_bound(C) >= f.degree


def test_degree_examples():
    b = CircuitBuilder(F3, 1)
    x = b.var(0)
    assert degree_bound(b.build(x)) == 1
    sq = b.mul(x, x)
    assert degree_bound(b.build(b.mul(sq, sq))) == 4


def test_degree_bound_monotone():
    rng = random.Random(2)
    for _ in range(50):
        C = random_circuit(F3, 2, rng, 10)
        nodes = list(C.nodes)
        for _ in range(5):
            k = len(nodes)
            nodes.append(Node(rng.choice(["add", "mul"]), None, C.out, rng.randrange(k)))
            D = Circuit(F3, 2, nodes, len(nodes) - 1)
            assert degree_bound(D) >= degree_bound(C)


def test_derivative_examples():
    b = CircuitBuilder(F3, 2)
    x1, x2 = b.var(0), b.var(1)
    d = derivative_circuit(b.build(x1), 0)
    assert to_sparse_poly(d) == parse_poly("1", F3, 2)
    d = derivative_circuit(b.build(b.mul(x1, x2)), 0)
    assert to_sparse_poly(d) == parse_poly("x2", F3, 2)
    assert to_sparse_poly(derivative_circuit(b.build(x2), 0)).is_zero()


@pytest.mark.parametrize("ring", [F9, Z9], ids=repr)
def test_derivative_vs_expansion(ring):
    rng = random.Random(3)
    for _ in range(100):
        C = random_circuit(ring, 2, rng, 10)
        for j in range(2):
            dC = derivative_circuit(C, j)
            df = partial_derivative(to_sparse_poly(C), j)
            assert to_sparse_poly(dC) == df
            pt = [ring.random(rng) for _ in range(2)]
            assert circuit_eval(dC, pt) == evaluate_at(df, pt)
            assert degree_bound(dC) <= max(degree_bound(C) - 1, 0)


def test_derivative_all_points_f9():
    rng = random.Random(4)
    pts = [[a, b] for a in F9.elements() for b in F9.elements()]
    for _ in range(100):
        C = random_circuit(F9, 2, rng, 8)
        dC = derivative_circuit(C, 0)
        df = partial_derivative(to_sparse_poly(C), 0)
        for pt in pts[::7]:
            assert circuit_eval(dC, pt) == evaluate_at(df, pt)


def test_expansion_examples():
    b = CircuitBuilder(Z9, 2)
    s = b.add(b.var(0), b.var(1))
    assert to_sparse_poly(b.build(b.mul(s, s))) == parse_poly("x1^2 + 2*x1*x2 + x2^2", Z9, 2)
    assert to_sparse_poly(b.build(b.var(1))) == parse_poly("x2", Z9, 2)


def test_expansion_cap():
    f = parse_poly("x1 + x2 + x3 + x4", F3, 4)
    C = circuit_from_poly(f * f)
    # (x1+...+x4)^2 has 10 terms
    assert len(to_sparse_poly(C, cap=10)) == 10
    g = parse_poly("x1 + x2 + x3 + x4 + 1", F3, 4)
    with pytest.raises(TermCapExceeded):
        to_sparse_poly(circuit_from_poly(g * g), cap=10)


def test_from_poly_roundtrip():
    rng = random.Random(5)
    from conftest import random_poly
    for _ in range(50):
        f = random_poly(Z9, 3, rng, 4, 4)
        assert to_sparse_poly(circuit_from_poly(f)) == f


def test_text_roundtrip():
    rng = random.Random(6)
    for ring in (F3, F9, Z9):
        for _ in range(20):
            C = random_circuit(ring, 3, rng, 9)
            assert parse_circuit(C.to_text(), ring, 3) == C


def test_parse_format():
    text = "n0 = var 1\nn1 = var 2\nn2 = mul n0 n1\nn3 = const 2\nn4 = add n2 n3\nout n4\n"
    C = parse_circuit(text, F3)
    assert C.nvars == 2
    assert to_sparse_poly(C) == parse_poly("x1*x2 + 2", F3, 2)


@pytest.mark.parametrize("text,line", [
    ("n0 = var 1\nn1 = mul n0 n5\nout n1", 2),
    ("n0 = var 0\nout n0", 1),
    ("n0 = foo 1\nout n0", 1),
    ("n0 = var 1\nn0 = var 1\nout n0", 2),
    ("n0 = var 1\nout n0\nn1 = var 1", 3),
])
def test_parse_errors(text, line):
    with pytest.raises(CircuitError) as exc:
        parse_circuit(text, F3)
    assert f"line {line}" in str(exc.value)


def test_parse_missing_out():
    with pytest.raises(CircuitError):
        parse_circuit("n0 = var 1\n", F3)


def test_invalid_structure():
    with pytest.raises(CircuitError):
        Circuit(F3, 1, [Node("add", None, 0, 0)], 0)
    with pytest.raises(CircuitError):
        Circuit(F3, 1, [Node("var", 3)], 0)


def test_builder_pow():
    b = CircuitBuilder(Z9, 1)
    C = b.build(b.pow(b.var(0), 13))
    assert to_sparse_poly(C) == parse_poly("x1^13", Z9, 1)
    assert C.size <= 8


def test_embed_with_coercion():
    b = CircuitBuilder(F3, 1)
    C = b.build(b.add(b.var(0), b.const(2)))
    big = CircuitBuilder(Z9, 1)
    D = big.build(big.embed(C, [big.var(0)], coerce=lambda c: Z9.lift(c)))
    assert to_sparse_poly(D) == parse_poly("x1 + 2", Z9, 1)
