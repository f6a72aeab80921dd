"""Problem files: a small header followed by named polynomials or circuits.

    # comment
    p = 2
    e = 1
    modulus = [1,1,1]      # optional, coordinates low degree first
    vars = x1 x2
    precision = 3          # optional: polynomials live over the Galois ring
    f1 = x1^2 + x2
    circuit g = path/to/file.circ
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field

from .circuit import CircuitError, circuit_from_poly, parse_circuit, to_sparse_poly
from .poly import PolyError, parse_poly
from .rings import RingError, fq_context, gr_context, is_prime

HEADER_KEYS = ("p", "e", "modulus", "vars", "precision")


class ProblemError(ValueError):
    def __init__(self, msg, lineno=None):
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)
        self.lineno = lineno


@dataclass
class ProblemFile:
    p: int
    e: int
    vars: list
    base_field: object
    ring: object
    modulus: tuple | None = None
    precision: int | None = None
    polys: dict = field(default_factory=dict)
    circuits: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.vars)

    def polynomials(self) -> list:
        """Every entry as a SparsePoly, expanding circuits."""
        return [self.polys[k] if k in self.polys else to_sparse_poly(self.circuits[k])
                for k in self.order]

    def as_circuits(self) -> list:
        return [self.circuits[k] if k in self.circuits else circuit_from_poly(self.polys[k])
                for k in self.order]

    def to_text(self) -> str:
        lines = [f"p = {self.p}", f"e = {self.e}"]
        if self.modulus is not None:
            lines.append("modulus = " + json.dumps(list(self.modulus)).replace(" ", ""))
        lines.append("vars = " + " ".join(self.vars))
        if self.precision is not None:
            lines.append(f"precision = {self.precision}")
        for name in self.order:
            if name in self.polys:
                lines.append(f"{name} = {self.polys[name].to_text(self.vars)}")
        return "\n".join(lines) + "\n"


_ENTRY = re.compile(r"^(circuit\s+)?([A-Za-z_]\w*)\s*=\s*(.*)$")


def parse_problem(text: str, base_dir: str = ".") -> ProblemFile:
    header: dict = {}
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ENTRY.match(line)
        if not m:
            raise ProblemError(f"cannot parse {raw.strip()!r}", lineno)
        is_circ, name, rhs = bool(m.group(1)), m.group(2), m.group(3).strip()
        if not is_circ and name in HEADER_KEYS:
            if name in header:
                raise ProblemError(f"duplicate header key {name!r}", lineno)
            if entries:
                raise ProblemError(f"header key {name!r} after the first polynomial", lineno)
            header[name] = (rhs, lineno)
        else:
            entries.append((is_circ, name, rhs, lineno))

    def need_int(key, default=None):
        if key not in header:
            if default is None:
                raise ProblemError(f"missing header key {key!r}")
            return default
        rhs, ln = header[key]
        try:
            return int(rhs)
        except ValueError:
            raise ProblemError(f"{key} must be an integer, got {rhs!r}", ln) from None

    p = need_int("p")
    if not is_prime(p):
        raise ProblemError(f"p = {p} is not prime", header["p"][1])
    e = need_int("e", 1)
    if e < 1:
        raise ProblemError("e must be >= 1", header["e"][1])
    modulus = None
    if "modulus" in header:
        rhs, ln = header["modulus"]
        try:
            modulus = tuple(int(x) for x in json.loads(rhs))
        except (ValueError, TypeError):
            raise ProblemError(f"bad modulus {rhs!r}", ln) from None
        if len(modulus) != e + 1:
            raise ProblemError(f"modulus must have {e + 1} coordinates", ln)
    try:
        ctx = fq_context(p, e, modulus)
    except RingError as exc:
        raise ProblemError(str(exc), header.get("modulus", (None, None))[1]) from None
    if "vars" not in header:
        raise ProblemError("missing header key 'vars'")
    names = header["vars"][0].split()
    if not names or len(set(names)) != len(names):
        raise ProblemError("variable names must be nonempty and unique", header["vars"][1])
    precision = None
    ring = ctx
    if "precision" in header:
        precision = need_int("precision")
        if precision < 1:
            raise ProblemError("precision must be >= 1", header["precision"][1])
        ring = gr_context(ctx, precision)
    prob = ProblemFile(p, e, names, ctx, ring, modulus, precision)
    for is_circ, name, rhs, lineno in entries:
        if name in prob.polys or name in prob.circuits:
            raise ProblemError(f"duplicate name {name!r}", lineno)
        if is_circ:
            path = rhs if os.path.isabs(rhs) else os.path.join(base_dir, rhs)
            try:
                with open(path) as fh:
                    C = parse_circuit(fh.read(), ring, len(names))
            except (OSError, CircuitError, RingError, ValueError) as exc:
                raise ProblemError(f"circuit {name}: {exc}", lineno) from None
            prob.circuits[name] = C
        else:
            try:
                prob.polys[name] = parse_poly(rhs, ring, len(names), names)
            except (PolyError, RingError) as exc:
                raise ProblemError(f"{name}: {exc}", lineno) from None
        prob.order.append(name)
    if not prob.order:
        raise ProblemError("no polynomials given")
    return prob


def load_problem(path: str) -> ProblemFile:
    with open(path) as fh:
        return parse_problem(fh.read(), os.path.dirname(os.path.abspath(path)))


def problem_from_polys(fs, names=None, precision=None) -> ProblemFile:
    ctx = fs[0].ring
    n = fs[0].nvars
    names = names or [f"x{i + 1}" for i in range(n)]
    prob = ProblemFile(ctx.p, ctx.t, names, ctx, ctx, ctx.modulus if ctx.t > 1 else None, precision)
    for i, f in enumerate(fs, 1):
        prob.polys[f"f{i}"] = f
        prob.order.append(f"f{i}")
    return prob
