"""Vectorized (numpy) arithmetic for exhaustive checks over tiny rings.

Elements are addressed by integer codes (see ``QElem.code``).  The helpers
here build full operation tables for finite fields, Galois rings and
truncated Witt vectors so that homomorphism and ring-law checks can run over
every pair at once.
"""

from __future__ import annotations

import numpy as np

from .rings import FqContext, QElem, _QuotientRing, gr_context
from .witt import MAX_LEVEL, WittError, universal_witt_polys

_INT_LIMIT = 1 << 31


class FieldTable:
    """Codes 0..q-1 of F_q with log/exp tables for multiplication."""

    def __init__(self, ctx: FqContext):
        self.ctx = ctx
        self.p, self.t, self.q = ctx.p, ctx.t, ctx.order
        q = self.q
        self.digits = np.array([e.coords for e in ctx.elements()], dtype=np.int64).reshape(q, self.t)
        self.weights = self.ctx.p ** np.arange(self.t, dtype=np.int64)
        self.exp = np.zeros(q - 1, dtype=np.int64)
        self.log = np.full(q, -1, dtype=np.int64)
        z = ctx.one
        for k in range(q - 1):
            self.exp[k] = z.code
            self.log[z.code] = k
            z = z * ctx.generator
        self._add = None

    @property
    def add_table(self):
        if self._add is None:
            d = (self.digits[:, None, :] + self.digits[None, :, :]) % self.p
            self._add = d @ self.weights
        return self._add

    def add(self, a, b):
        return self.add_table[a, b]

    def neg(self, a):
        return ((-self.digits[a]) % self.p) @ self.weights

    def mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow(self, a, k: int):
        a = np.asarray(a)
        if k == 0:
            return np.ones_like(a)
        out = self.exp[(self.log[a] * (k % (self.q - 1))) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    def frobenius_inverse(self, a):
        return self.pow(a, self.p ** (self.t - 1))


class GaloisArray:
    """A batch of elements of a ring (Z/N)[x]/(h), stored as an (n, t) array."""

    __slots__ = ("ring", "a")

    def __init__(self, ring: _QuotientRing, a):
        if ring.N >= _INT_LIMIT:
            raise OverflowError(f"modulus {ring.N} too large for int64 batches")
        self.ring = ring
        self.a = np.asarray(a, dtype=np.int64)

    @classmethod
    def from_codes(cls, ring, codes):
        codes = np.asarray(codes, dtype=np.int64)
        cols = []
        for _ in range(ring.t):
            cols.append(codes % ring.N)
            codes = codes // ring.N
        return cls(ring, np.stack(cols, axis=-1))

    @classmethod
    def from_elems(cls, ring, elems):
        return cls(ring, np.array([e.coords for e in elems], dtype=np.int64).reshape(-1, ring.t))

    @classmethod
    def full(cls, ring, n, elem):
        return cls(ring, np.tile(np.array(elem.coords, dtype=np.int64), (n, 1)))

    def codes(self):
        w = self.ring.N ** np.arange(self.ring.t, dtype=np.int64)
        return self.a @ w

    def to_elems(self):
        return [self.ring._make(tuple(int(x) for x in row)) for row in self.a]

    def __len__(self):
        return self.a.shape[0]

    def __getitem__(self, idx):
        return GaloisArray(self.ring, self.a[idx])

    def _other(self, other):
        if isinstance(other, GaloisArray):
            return other.a
        if isinstance(other, QElem):
            return np.array(other.coords, dtype=np.int64)[None, :]
        if isinstance(other, int):
            return np.array(self.ring.from_int(other).coords, dtype=np.int64)[None, :]
        return None

    def __add__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return GaloisArray(self.ring, (self.a + b) % self.ring.N)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return GaloisArray(self.ring, (self.a - b) % self.ring.N)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GaloisArray(self.ring, (-self.a) % self.ring.N)

    def __mul__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        ring = self.ring
        N, t = ring.N, ring.t
        a = self.a
        if t == 1:
            return GaloisArray(ring, (a * b) % N)
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        prod = np.zeros(shape + (2 * t - 1,), dtype=np.int64)
        for i in range(t):
            ai = a[..., i]
            for j in range(t):
                prod[..., i + j] = (prod[..., i + j] + ai * b[..., j]) % N
        mod = ring.modulus
        for k in range(2 * t - 2, t - 1, -1):
            c = prod[..., k]
            for j in range(t):
                if mod[j]:
                    prod[..., k - t + j] = (prod[..., k - t + j] - c * mod[j]) % N
        return GaloisArray(ring, prod[..., :t])

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = GaloisArray.full(self.ring, len(self), self.ring.one)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def is_zero(self):
        return ~self.a.any(axis=-1)

    def sum(self):
        """Sum of all rows as a single ring element."""
        s = self.a.sum(axis=0) % self.ring.N
        return self.ring._make(tuple(int(x) for x in s))

    def val_p(self):
        """Row-wise p-adic valuation capped at log_p N."""
        p = self.ring.p
        m = 0
        n = self.ring.N
        while n > 1:
            n //= p
            m += 1
        out = np.full(len(self), m, dtype=np.int64)
        a = self.a.copy()
        for v in range(m):
            nz = (a % p != 0).any(axis=-1)
            out = np.where(nz & (out == m), v, out)
            a = a // p
        return out


# ---------------------------------------------------------------------------
# Witt vector tables

UNIVERSAL_LEVEL_FIT = {2: 4, 3: 3}
DEFAULT_LEVEL_FIT = 2


def universal_fits(p: int, length: int) -> bool:
    """Whether S_{L-1}, P_{L-1} are cheap enough to derive and evaluate."""
    top = min(UNIVERSAL_LEVEL_FIT.get(p, DEFAULT_LEVEL_FIT), MAX_LEVEL)
    return length - 1 <= top


def witt_codes_to_coords(codes, q, L):
    return [(codes // q ** i) % q for i in range(L)]


def coords_to_witt_codes(coords, q):
    out = np.zeros_like(coords[0])
    for i, c in enumerate(coords):
        out = out + c * q ** i
    return out


def _eval_universal(ft: FieldTable, f, values):
    """Evaluate an integer polynomial on arrays of field codes."""
    p = ft.p
    shape = values[0].shape
    total = np.zeros(shape, dtype=np.int64)
    cache = {}
    for e, c in f.terms.items():
        c %= p
        if not c:
            continue
        term = np.full(shape, c, dtype=np.int64)
        for j, k in enumerate(e):
            if k:
                key = (j, k)
                if key not in cache:
                    cache[key] = ft.pow(values[j], k)
                term = ft.mul(term, cache[key])
        total = ft.add(total, term)
    return total


def _witt_universal(ft: FieldTable, L, xa, xb, op):
    out = []
    for n in range(L):
        polys = universal_witt_polys(ft.p, n)
        f = polys.S if op == "add" else polys.P
        out.append(_eval_universal(ft, f, xa[: n + 1] + xb[: n + 1]))
    return out


def _witt_ghost(ft: FieldTable, L, xa, xb, op):
    p = ft.p
    big = _QuotientRing(p, p ** L, ft.ctx.modulus)
    la = [GaloisArray(big, ft.digits[x]) for x in xa]
    lb = [GaloisArray(big, ft.digits[x]) for x in xb]

    def ghost(v, n):
        total = v[n] * (p ** n)
        for j in range(n):
            total = total + (v[j] ** (p ** (n - j))) * (p ** j)
        return total

    sol = []
    for n in range(L):
        wa, wb = ghost(la, n), ghost(lb, n)
        w = wa + wb if op == "add" else wa * wb
        for j in range(n):
            w = w - (sol[j] ** (p ** (n - j))) * (p ** j)
        d = p ** n
        if (w.a % d).any():
            raise WittError("ghost division not exact")
        sol.append(GaloisArray(big, w.a // d))
    return [(s.a % p) @ ft.weights for s in sol]


def witt_op_table(ctx: FqContext, L: int, op: str, engine: str = "auto", ft: FieldTable | None = None):
    """Full Q x Q table of Witt-vector codes for op in {add, mul}, Q = q^L."""
    ft = ft or FieldTable(ctx)
    if engine == "auto":
        engine = "universal" if universal_fits(ctx.p, L) else "ghost"
    q = ft.q
    Q = q ** L
    A, B = np.meshgrid(np.arange(Q), np.arange(Q), indexing="ij")
    xa = witt_codes_to_coords(A.ravel(), q, L)
    xb = witt_codes_to_coords(B.ravel(), q, L)
    if engine == "universal":
        coords = _witt_universal(ft, L, xa, xb, op)
    elif engine == "ghost":
        coords = _witt_ghost(ft, L, xa, xb, op)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return coords_to_witt_codes(coords, q).reshape(Q, Q)


def witt_to_galois_table(ctx: FqContext, L: int, ft: FieldTable | None = None):
    """Galois-ring codes of witt_to_galois for every Witt code."""
    ft = ft or FieldTable(ctx)
    gr = gr_context(ctx, L)
    q = ft.q
    teich = GaloisArray.from_elems(gr, [gr.teichmuller(a) for a in ctx.elements()])
    coords = witt_codes_to_coords(np.arange(q ** L), q, L)
    total = GaloisArray(gr, np.zeros((q ** L, gr.t), dtype=np.int64))
    for i, c in enumerate(coords):
        root = c
        for _ in range(i):
            root = ft.frobenius_inverse(root)
        total = total + teich[root] * (ctx.p ** i)
    return gr, total.codes()


def galois_op_table(gr, op: str):
    size = gr.size
    A, B = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    ga = GaloisArray.from_codes(gr, A.ravel())
    gb = GaloisArray.from_codes(gr, B.ravel())
    res = ga + gb if op == "add" else ga * gb
    return res.codes().reshape(size, size)


def check_witt_galois_isomorphism(ctx: FqContext, L: int, engine: str = "auto") -> dict:
    """Exhaustively verify that witt_to_galois is a bijective ring map."""
    ft = FieldTable(ctx)
    gr, img = witt_to_galois_table(ctx, L, ft)
    report = {"p": ctx.p, "t": ctx.t, "L": L, "size": int(ft.q ** L)}
    report["bijective"] = bool(len(np.unique(img)) == gr.size == ft.q ** L)
    report["one"] = bool(img[1] == gr.one.code) and bool(img[0] == 0)
    for op in ("add", "mul"):
        wt = witt_op_table(ctx, L, op, engine, ft)
        gt = galois_op_table(gr, op)
        report[op] = bool(np.array_equal(img[wt], gt[img[:, None], img[None, :]]))
    report["ok"] = all(report[k] for k in ("bijective", "one", "add", "mul"))
    return report


def field_op_tables(ctx: FqContext):
    ft = FieldTable(ctx)
    q = ft.q
    A, B = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    return ft.add_table, ft.mul(A, B)


def ring_op_tables(ring):
    """Add/mul tables for a generic quotient ring, via GaloisArray."""
    return galois_op_table(ring, "add"), galois_op_table(ring, "mul")


def check_ring_laws(add, mul, zero: int, one: int, triples=None) -> bool:
    """Ring axioms from op tables; `triples` = (a, b, c) index arrays, else all."""
    n = add.shape[0]
    idx = np.arange(n)
    if not (np.array_equal(add, add.T) and np.array_equal(mul, mul.T)):
        return False
    if not (np.array_equal(add[zero], idx) and np.array_equal(mul[one], idx)):
        return False
    if not (add == zero).any(axis=1).all():
        return False
    if triples is None:
        for a in range(n):
            if not np.array_equal(add[add[a]], add[a][add]):
                return False
            if not np.array_equal(mul[mul[a]], mul[a][mul]):
                return False
            if not np.array_equal(mul[a][add], add[mul[a][:, None], mul[a][None, :]]):
                return False
        return True
    a, b, c = triples
    return bool(np.array_equal(add[add[a, b], c], add[a, add[b, c]])
                and np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]])
                and np.array_equal(mul[a, add[b, c]], add[mul[a, b], mul[a, c]]))
