"""Arithmetic circuits: a topologically ordered DAG of const/var/add/mul gates.

Evaluation is duck-typed: anything supporting + and * works as a value,
including the batched ``GaloisArray`` from :mod:`wittjac.exhaustive`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .poly import SparsePoly, TermCapExceeded, mul


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    op: str  # "const" | "var" | "add" | "mul"
    arg: object = None  # constant value or variable index
    a: int = -1
    b: int = -1


class Circuit:
    """Immutable circuit over a coefficient ring in `nvars` inputs (0-based)."""

    def __init__(self, ring, nvars: int, nodes, out: int):
        nodes = tuple(nodes)
        for i, nd in enumerate(nodes):
            if nd.op in ("add", "mul"):
                if not (0 <= nd.a < i and 0 <= nd.b < i):
                    raise CircuitError(f"node {i} references a later or invalid node")
            elif nd.op == "var":
                if not 0 <= nd.arg < nvars:
                    raise CircuitError(f"node {i}: variable {nd.arg} out of range")
            elif nd.op != "const":
                raise CircuitError(f"node {i}: unknown gate {nd.op!r}")
        if not 0 <= out < len(nodes):
            raise CircuitError("output node out of range")
        self.ring = ring
        self.nvars = nvars
        self.nodes = nodes
        self.out = out

    @property
    def size(self) -> int:
        return len(self.nodes)

    def __repr__(self):
        return f"Circuit(size={self.size}, nvars={self.nvars}, ring={self.ring!r})"

    def __call__(self, point, coerce=None):
        return circuit_eval(self, point, coerce)

    def to_text(self) -> str:
        lines = []
        for i, nd in enumerate(self.nodes):
            if nd.op == "const":
                lines.append(f"n{i} = const {self.ring.coeff_to_text(nd.arg)}")
            elif nd.op == "var":
                lines.append(f"n{i} = var {nd.arg + 1}")
            else:
                lines.append(f"n{i} = {nd.op} n{nd.a} n{nd.b}")
        lines.append(f"out n{self.out}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, ring, nvars: int | None = None) -> "Circuit":
        return parse_circuit(text, ring, nvars)

    def __eq__(self, other):
        return (isinstance(other, Circuit) and self.nvars == other.nvars
                and self.nodes == other.nodes and self.out == other.out)

    def __hash__(self):
        return hash((self.nvars, self.nodes, self.out))


class CircuitBuilder:
    """Append-only construction with structural sharing of constants/vars."""

    def __init__(self, ring, nvars: int):
        self.ring = ring
        self.nvars = nvars
        self.nodes: list[Node] = []
        self._memo: dict = {}

    def _push(self, node):
        arg = getattr(node.arg, "coords", node.arg)
        key = (node.op, arg, node.a, node.b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self.nodes.append(node)
        self._memo[key] = len(self.nodes) - 1
        return len(self.nodes) - 1

    def const(self, c):
        if isinstance(c, int):
            c = self.ring.from_int(c)
        return self._push(Node("const", c))

    def var(self, j: int):
        if not 0 <= j < self.nvars:
            raise CircuitError(f"variable {j} out of range")
        return self._push(Node("var", j))

    def add(self, a, b):
        return self._push(Node("add", None, a, b))

    def mul(self, a, b):
        return self._push(Node("mul", None, a, b))

    def sub(self, a, b):
        return self.add(a, self.mul(self.const(-1), b))

    def sum(self, items):
        items = list(items)
        if not items:
            return self.const(0)
        acc = items[0]
        for x in items[1:]:
            acc = self.add(acc, x)
        return acc

    def product(self, items):
        items = list(items)
        if not items:
            return self.const(1)
        acc = items[0]
        for x in items[1:]:
            acc = self.mul(acc, x)
        return acc

    def pow(self, a, k: int):
        """a^k by repeated squaring (no power gates)."""
        if k < 0:
            raise CircuitError("negative exponent")
        result = None
        base = a
        while k:
            if k & 1:
                result = base if result is None else self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return self.const(1) if result is None else result

    def embed(self, C: Circuit, inputs, coerce=None):
        """Copy circuit C with its variable j wired to node inputs[j]."""
        m = {}
        for i, nd in enumerate(C.nodes):
            if nd.op == "const":
                m[i] = self.const(coerce(nd.arg) if coerce else nd.arg)
            elif nd.op == "var":
                m[i] = inputs[nd.arg]
            elif nd.op == "add":
                m[i] = self.add(m[nd.a], m[nd.b])
            else:
                m[i] = self.mul(m[nd.a], m[nd.b])
        return m[C.out]

    def poly(self, f: SparsePoly):
        """Circuit for a sparse polynomial, as a sum of monomials."""
        terms = []
        for e, c in f.sorted_terms():
            factors = [self.pow(self.var(j), k) for j, k in enumerate(e) if k]
            terms.append(self.product([self.const(c)] + factors))
        return self.sum(terms)

    def build(self, out: int) -> Circuit:
        return Circuit(self.ring, self.nvars, self.nodes, out)


def circuit_from_poly(f: SparsePoly) -> Circuit:
    b = CircuitBuilder(f.ring, f.nvars)
    return b.build(b.poly(f))


def circuit_eval(C: Circuit, point, coerce=None):
    """Topological evaluation; `coerce` maps constants into the value ring."""
    if len(point) != C.nvars:
        raise CircuitError(f"expected {C.nvars} inputs, got {len(point)}")
    vals = [None] * C.size
    for i, nd in enumerate(C.nodes):
        if nd.op == "const":
            vals[i] = coerce(nd.arg) if coerce else nd.arg
        elif nd.op == "var":
            vals[i] = point[nd.arg]
        elif nd.op == "add":
            vals[i] = vals[nd.a] + vals[nd.b]
        else:
            vals[i] = vals[nd.a] * vals[nd.b]
    return vals[C.out]


def degree_bound(C: Circuit) -> int:
    """Syntactic degree: var 1, const 0, add max, mul sum."""
    deg = []
    for nd in C.nodes:
        if nd.op == "const":
            deg.append(0)
        elif nd.op == "var":
            deg.append(1)
        elif nd.op == "add":
            deg.append(max(deg[nd.a], deg[nd.b]))
        else:
            deg.append(deg[nd.a] + deg[nd.b])
    return deg[C.out]


def derivative_circuit(C: Circuit, j: int) -> Circuit:
    """Forward-mode d C / d x_j.

    Derivatives known to be zero are tracked as None and pruned, so the
    result's syntactic degree never exceeds degree_bound(C) - 1.
    """
    if not 0 <= j < C.nvars:
        raise CircuitError(f"variable {j} out of range")
    b = CircuitBuilder(C.ring, C.nvars)
    val: list = []
    der: list = []
    for nd in C.nodes:
        if nd.op == "const":
            val.append(b.const(nd.arg))
            der.append(None)
        elif nd.op == "var":
            val.append(b.var(nd.arg))
            der.append(b.const(1) if nd.arg == j else None)
        elif nd.op == "add":
            val.append(b.add(val[nd.a], val[nd.b]))
            da, db = der[nd.a], der[nd.b]
            der.append(da if db is None else db if da is None else b.add(da, db))
        else:
            val.append(b.mul(val[nd.a], val[nd.b]))
            da, db = der[nd.a], der[nd.b]
            parts = []
            if da is not None:
                parts.append(b.mul(da, val[nd.b]))
            if db is not None:
                parts.append(b.mul(val[nd.a], db))
            der.append(b.sum(parts) if parts else None)
    d = der[C.out]
    if d is None:
        d = b.const(0)
    return b.build(d)


TERM_CAP = 10 ** 5


def to_sparse_poly(C: Circuit, cap: int = TERM_CAP) -> SparsePoly:
    n = C.nvars
    vals = []
    for nd in C.nodes:
        if nd.op == "const":
            v = SparsePoly.const(C.ring, n, nd.arg)
        elif nd.op == "var":
            v = SparsePoly.var(C.ring, n, nd.arg)
        elif nd.op == "add":
            v = vals[nd.a] + vals[nd.b]
        else:
            v = mul(vals[nd.a], vals[nd.b], cap)
        if len(v) > cap:
            raise TermCapExceeded(cap, "circuit expansion")
        vals.append(v)
    return vals[C.out]


_LINE = re.compile(r"^n(\d+)\s*=\s*(const|var|add|mul)\s+(.+?)\s*$")


def parse_circuit(text: str, ring, nvars: int | None = None) -> Circuit:
    """Parse the line format; node names must be n0, n1, ... in order."""
    nodes = []
    names = {}
    out = None
    max_var = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if out is not None:
            raise CircuitError(f"line {lineno}: content after 'out'")
        if line.startswith("out"):
            name = line[3:].strip()
            if name not in names:
                raise CircuitError(f"line {lineno}: unknown output node {name!r}")
            out = names[name]
            continue
        m = _LINE.match(line)
        if not m:
            raise CircuitError(f"line {lineno}: cannot parse {raw!r}")
        name = f"n{m.group(1)}"
        if name in names:
            raise CircuitError(f"line {lineno}: duplicate node {name}")
        op, rest = m.group(2), m.group(3)
        try:
            if op == "const":
                nodes.append(Node("const", ring.parse_coeff(rest)))
            elif op == "var":
                j = int(rest)
                if j < 1:
                    raise ValueError("variables are numbered from 1")
                max_var = max(max_var, j)
                nodes.append(Node("var", j - 1))
            else:
                args = rest.split()
                if len(args) != 2 or any(a not in names for a in args):
                    raise ValueError(f"bad operands {rest!r}")
                nodes.append(Node(op, None, names[args[0]], names[args[1]]))
        except ValueError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
        names[name] = len(nodes) - 1
    if out is None:
        raise CircuitError("missing 'out' line")
    if nvars is None:
        nvars = max_var
    elif max_var > nvars:
        raise CircuitError(f"circuit uses x{max_var} but arity is {nvars}")
    return Circuit(ring, nvars, nodes, out)
