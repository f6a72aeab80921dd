"""Brute-force ground truth for algebraic independence.

Search for a nonzero F(y_1..y_r) of degree <= d with F(f_1..f_r) = 0 by
solving a linear system over F_q, deepening d up to prod max(deg f_i, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .exhaustive import FieldTable
from .poly import SparsePoly, mul
from .rings import FqContext
from .wjcore import IndependenceVerdict

UNKNOWN_CAP = 2 * 10 ** 4
_TABLE_MAX = 1024


class OracleCapExceeded(RuntimeError):
    pass


_tables: dict = {}


def field_table(ctx: FqContext) -> FieldTable:
    ft = _tables.get(ctx)
    if ft is None:
        if ctx.order > _TABLE_MAX:
            raise OracleCapExceeded(f"field of order {ctx.order} too large for dense elimination")
        ft = _tables[ctx] = FieldTable(ctx)
    return ft


def _inv(ft, a: int) -> int:
    return int(ft.exp[(-ft.log[a]) % (ft.q - 1)])


def nullspace(M, ctx: FqContext):
    """A nonzero kernel vector of M (rows x cols of field elements) or None.

    M may be a nested list of field elements or an int array of codes.
    Elimination picks the first nonzero entry as pivot; the returned vector
    has a 1 at the first free column.
    """
    ft = field_table(ctx)
    if isinstance(M, np.ndarray):
        A = M.astype(np.int64, copy=True)
    else:
        A = np.array([[c.code for c in row] for row in M], dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    v = _kernel_codes(A, ft)
    if v is None:
        return None
    return [ctx.from_code(int(c)) for c in v]


def _kernel_codes(A, ft: FieldTable):
    rows, cols = A.shape
    neg = ft.neg(np.arange(ft.q))
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = ft.mul(A[r], _inv(ft, int(A[r, c])))
        factors = A[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if len(hit):
            sub = ft.mul(factors[hit, None], A[r][None, :])
            A[hit] = ft.add_table[A[hit], neg[sub]]
        pivots.append(c)
        r += 1
    if len(pivots) == cols:
        return None
    free = next(c for c in range(cols) if c not in set(pivots))
    v = np.zeros(cols, dtype=np.int64)
    v[free] = 1
    for i, c in enumerate(pivots):
        v[c] = neg[A[i, free]]
    return v


@dataclass
class Annihilator:
    F: SparsePoly
    degree_bound: int

    def to_json(self):
        return self.F.to_json()

    def to_text(self):
        return self.F.to_text([f"y{i + 1}" for i in range(self.F.nvars)])


def compose(F: SparsePoly, fs) -> SparsePoly:
    """F(f_1, ..., f_r)."""
    ring, n = fs[0].ring, fs[0].nvars
    total = SparsePoly.zero(ring, n)
    for beta, c in F.terms.items():
        term = SparsePoly.const(ring, n, c)
        for f, k in zip(fs, beta):
            if k:
                term = term * f ** k
        total = total + term
    return total


def _y_monomials(r: int, d: int):
    """Exponent vectors of total degree <= d, graded then lex ascending."""
    out = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(r), deg):
            e = [0] * r
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return out


class _PowerCache:
    """f^beta for exponent vectors beta, built by one multiplication each."""

    def __init__(self, fs):
        self.fs = fs
        self.cache = {(0,) * len(fs): SparsePoly.const(fs[0].ring, fs[0].nvars, 1)}

    def get(self, beta):
        hit = self.cache.get(beta)
        if hit is not None:
            return hit
        i = next(k for k, b in enumerate(beta) if b)
        prev = list(beta)
        prev[i] -= 1
        val = mul(self.get(tuple(prev)), self.fs[i])
        self.cache[beta] = val
        return val


def annihilating_search(fs, d: int, cap: int = UNKNOWN_CAP, _powers=None) -> Annihilator | None:
    """A verified annihilator of total degree <= d, or None."""
    if d < 1:
        raise ValueError("degree bound must be >= 1")
    ring = fs[0].ring
    r = len(fs)
    if comb(d + r, r) > cap:
        raise OracleCapExceeded(f"{comb(d + r, r)} unknowns exceed the cap of {cap}")
    ft = field_table(ring)
    powers = _powers or _PowerCache(fs)
    ys = _y_monomials(r, d)
    row_of: dict = {}
    entries = []
    for col, beta in enumerate(ys):
        for e, c in powers.get(beta).terms.items():
            row = row_of.setdefault(e, len(row_of))
            entries.append((row, col, c.code))
    A = np.zeros((max(len(row_of), 1), len(ys)), dtype=np.int64)
    for row, col, code in entries:
        A[row, col] = code
    v = _kernel_codes(A, ft)
    if v is None:
        return None
    F = SparsePoly(ring, r, {beta: ring.from_code(int(c)) for beta, c in zip(ys, v) if c})
    # monic in graded-lex order
    F = F.scale(F.sorted_terms()[0][1].inverse())
    if compose(F, fs):
        raise AssertionError("annihilator failed verification")
    return Annihilator(F, d)


def annihilator_degree_bound(fs) -> int:
    out = 1
    for f in fs:
        out *= max(f.degree, 1)
    return out


def independence_oracle(fs, cap: int = UNKNOWN_CAP) -> IndependenceVerdict:
    """Dependent iff some annihilator of degree <= prod max(deg f_i, 1) exists.

    An "independent" answer means no annihilator exists up to that bound.
    """
    ring = fs[0].ring
    if not isinstance(ring, FqContext):
        raise ValueError("oracle works over finite fields only")
    D = annihilator_degree_bound(fs)
    r = len(fs)
    if comb(D + r, r) > cap:
        raise OracleCapExceeded(f"bound {D} needs {comb(D + r, r)} unknowns, cap {cap}")
    powers = _PowerCache(fs)
    # the solution spaces are nested in d, so one solve at D settles the verdict;
    # deepening from 1 then finds the smallest degree
    if annihilating_search(fs, D, cap, powers) is None:
        return IndependenceVerdict("independent", "perron",
                                   detail=f"no annihilator up to degree {D}", extra={"degree_bound": D})
    for d in range(1, D + 1):
        ann = annihilating_search(fs, d, cap, powers)
        if ann is not None:
            return IndependenceVerdict("dependent", "perron", detail=f"annihilator of degree <= {d}",
                                       extra={"annihilator": ann.to_json(),
                                              "annihilator_text": ann.to_text(),
                                              "degree_bound": D})
    raise AssertionError("annihilator vanished while deepening")
