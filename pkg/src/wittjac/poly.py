"""Sparse multivariate polynomials over the rings of :mod:`wittjac.rings`.

Variables are indexed from 0 in the Python API and written x1, x2, ... in
text.  A polynomial stores a dict mapping exponent tuples to nonzero
coefficients; values are treated as immutable.

Text format: terms ``coeff*x1^a1*x2^a2`` joined by ``+`` (``-`` accepted on
input).  JSON format: a list of ``{"exps": [...], "coeff": [...]}``.
"""

from __future__ import annotations

import math
import re
from itertools import permutations

from .rings import RingError


class PolyError(ValueError):
    pass


class TermCapExceeded(PolyError):
    def __init__(self, cap, what="polynomial"):
        super().__init__(f"{what} exceeds the term cap of {cap}")
        self.cap = cap


class KroneckerCollision(PolyError):
    pass


def _add_exps(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _grlex_key(e):
    return (sum(e), e)


class SparsePoly:
    __slots__ = ("ring", "nvars", "terms")

    def __init__(self, ring, nvars: int, terms=None):
        self.ring = ring
        self.nvars = nvars
        self.terms = {} if terms is None else {e: c for e, c in terms.items() if c}

    @classmethod
    def _raw(cls, ring, nvars, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.nvars = nvars
        obj.terms = terms
        return obj

    # constructors
    @classmethod
    def zero(cls, ring, nvars):
        return cls._raw(ring, nvars, {})

    @classmethod
    def const(cls, ring, nvars, c):
        if isinstance(c, int):
            c = ring.from_int(c)
        return cls(ring, nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, ring, nvars, j):
        e = [0] * nvars
        e[j] = 1
        return cls._raw(ring, nvars, {tuple(e): ring.one})

    @classmethod
    def monomial(cls, ring, nvars, exps, c=None):
        c = ring.one if c is None else c
        if isinstance(c, int):
            c = ring.from_int(c)
        return cls(ring, nvars, {tuple(exps): c})

    # basic queries
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def coeff(self, exps):
        return self.terms.get(tuple(exps), self.ring.zero)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def _check(self, other):
        if not isinstance(other, SparsePoly):
            raise PolyError(f"expected SparsePoly, got {type(other).__name__}")
        if other.nvars != self.nvars:
            raise PolyError(f"arity mismatch: {self.nvars} vs {other.nvars}")
        if other.ring is not self.ring and other.ring != self.ring:
            raise PolyError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")

    def _scalar(self, c):
        if isinstance(c, int):
            c = self.ring.from_int(c)
        return c

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            return self + SparsePoly.const(self.ring, self.nvars, self._scalar(other))
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            if e in terms:
                s = terms[e] + c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
            else:
                terms[e] = c
        return SparsePoly._raw(self.ring, self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._raw(self.ring, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = self._scalar(c)
        terms = {}
        for e, a in self.terms.items():
            b = a * c
            if b:
                terms[e] = b
        return SparsePoly._raw(self.ring, self.nvars, terms)

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check(other)
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return poly_pow(self, k)

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            if isinstance(other, int):
                return self == SparsePoly.const(self.ring, self.nvars, other)
            return NotImplemented
        return (self.nvars == other.nvars and self.ring == other.ring
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def map_coeffs(self, fn, ring):
        """Apply fn to every coefficient, landing in `ring`; zeros dropped."""
        return SparsePoly(ring, self.nvars, {e: fn(c) for e, c in self.terms.items()})

    def __call__(self, values):
        return evaluate_at(self, values)

    def __repr__(self):
        return f"SparsePoly({self.to_text()!r}, nvars={self.nvars}, ring={self.ring!r})"

    def __str__(self):
        return self.to_text()

    # serialization
    def to_text(self, names=None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            ctext = self.ring.coeff_to_text(c)
            if not factors:
                parts.append(ctext)
            elif c == self.ring.one:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([ctext] + factors))
        return " + ".join(parts)

    @classmethod
    def from_text(cls, ring, nvars, text, names=None):
        return parse_poly(text, ring, nvars, names)

    def to_json(self):
        return [{"exps": list(e), "coeff": self.ring.coeff_to_json(c)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, ring, nvars, obj):
        out = cls.zero(ring, nvars)
        for term in obj:
            exps = tuple(int(x) for x in term["exps"])
            if len(exps) != nvars:
                raise PolyError(f"term {term!r} has wrong arity (expected {nvars})")
            out = out + cls.monomial(ring, nvars, exps, ring.coeff_from_json(term["coeff"]))
        return out


def mul(f: SparsePoly, g: SparsePoly, cap: int | None = None) -> SparsePoly:
    if len(f.terms) > len(g.terms):
        f, g = g, f
    terms: dict = {}
    get = terms.get
    gitems = list(g.terms.items())
    for ea, ca in f.terms.items():
        for eb, cb in gitems:
            e = _add_exps(ea, eb)
            prev = get(e)
            terms[e] = ca * cb if prev is None else prev + ca * cb
        if cap is not None and len(terms) > cap:
            terms = {e: c for e, c in terms.items() if c}
            if len(terms) > cap:
                raise TermCapExceeded(cap)
    return SparsePoly._raw(f.ring, f.nvars, {e: c for e, c in terms.items() if c})


def poly_pow(f: SparsePoly, k: int, cap: int | None = None) -> SparsePoly:
    if k < 0:
        raise PolyError("negative exponent")
    result = SparsePoly.const(f.ring, f.nvars, f.ring.one)
    base = f
    while k:
        if k & 1:
            result = mul(result, base, cap)
        k >>= 1
        if k:
            base = mul(base, base, cap)
    return result


_TOKEN = re.compile(r"\s*(?:(\[[^\]]*\])|(\d+)|([A-Za-z_]\w*)|(\^)|(\*)|(\+)|(-)|(\S))")


def parse_poly(text: str, ring, nvars: int, names=None) -> SparsePoly:
    """Parse the text format; raises PolyError with a column on failure."""
    if names is not None:
        index = {name: i for i, name in enumerate(names)}
    else:
        index = None

    def var_index(name, pos):
        if index is not None:
            if name not in index:
                raise PolyError(f"unknown variable {name!r} at column {pos}")
            return index[name]
        m = re.fullmatch(r"x(\d+)", name)
        if not m:
            raise PolyError(f"bad variable name {name!r} at column {pos}")
        j = int(m.group(1)) - 1
        if not 0 <= j < nvars:
            raise PolyError(f"variable {name} out of range 1..{nvars} at column {pos}")
        return j

    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group(8) is not None:
            raise PolyError(f"unexpected character {m.group(8)!r} at column {m.start(8) + 1}")
        kind = m.lastindex
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
    if not tokens:
        raise PolyError("empty polynomial")

    result = SparsePoly.zero(ring, nvars)
    i = 0
    sign = 1
    expect_term = True
    while i < len(tokens):
        kind, val, pos = tokens[i]
        if kind in (6, 7):
            if expect_term and kind == 7:
                sign = -sign
            elif expect_term:
                raise PolyError(f"unexpected '+' at column {pos}")
            else:
                sign = 1 if kind == 6 else -1
                expect_term = True
            i += 1
            continue
        if not expect_term:
            raise PolyError(f"expected '+' or '-' at column {pos}")
        coeff = ring.one
        exps = [0] * nvars
        while True:
            kind, val, pos = tokens[i]
            if kind in (1, 2):
                try:
                    coeff = coeff * ring.parse_coeff(val)
                except (RingError, ValueError) as exc:
                    raise PolyError(f"bad coefficient {val!r} at column {pos}: {exc}") from None
                i += 1
            elif kind == 3:
                j = var_index(val, pos)
                i += 1
                k = 1
                if i < len(tokens) and tokens[i][0] == 4:
                    if i + 1 >= len(tokens) or tokens[i + 1][0] != 2:
                        raise PolyError(f"malformed exponent after {val} at column {tokens[i][2]}")
                    k = int(tokens[i + 1][1])
                    i += 2
                exps[j] += k
            else:
                raise PolyError(f"unexpected {val!r} at column {pos}")
            if i < len(tokens) and tokens[i][0] == 5:
                i += 1
                if i >= len(tokens):
                    raise PolyError("dangling '*' at end of input")
                continue
            break
        if sign < 0:
            coeff = -coeff
        result = result + SparsePoly.monomial(ring, nvars, exps, coeff)
        expect_term = False
        sign = 1
    if expect_term:
        raise PolyError("polynomial ends with an operator")
    return result


# ---------------------------------------------------------------------------
# calculus and linear algebra


def partial_derivative(f: SparsePoly, j: int) -> SparsePoly:
    """d f / d x_j (0-based j); integer multipliers are mapped into the ring."""
    if not 0 <= j < f.nvars:
        raise PolyError(f"variable index {j} out of range")
    ring = f.ring
    terms = {}
    for e, c in f.terms.items():
        k = e[j]
        if not k:
            continue
        d = ring.from_int(k) * c
        if d:
            e2 = list(e)
            e2[j] -= 1
            terms[tuple(e2)] = d
    return SparsePoly._raw(ring, f.nvars, terms)


class PolyMatrix:
    """Rectangular matrix of SparsePoly entries."""

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise PolyError("ragged matrix")
        self.rows = rows

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    def __repr__(self):
        return "PolyMatrix(" + repr([[str(x) for x in r] for r in self.rows]) + ")"


def jacobian_matrix(fs, I) -> PolyMatrix:
    """Entry (i, k) is d f_i / d x_{I[k]}; I strictly increasing, 0-based."""
    I = list(I)
    if not fs:
        raise PolyError("empty polynomial list")
    n = fs[0].nvars
    if any(a >= b for a, b in zip(I, I[1:])) or any(not 0 <= j < n for j in I):
        raise PolyError(f"invalid index set {I} for {n} variables")
    return PolyMatrix([[partial_derivative(f, j) for j in I] for f in fs])


DET_BOUND = 5


def det_division_free(M: PolyMatrix, bound: int = DET_BOUND, cap: int | None = None) -> SparsePoly:
    """Determinant by Laplace expansion memoized over column subsets.

    Uses only ring additions and multiplications, so it is valid over rings
    with zero divisors such as Galois-ring coefficient rings.
    """
    r, c = M.shape
    if r != c:
        raise PolyError(f"determinant of non-square {r}x{c} matrix")
    if r > bound:
        raise PolyError(f"matrix size {r} exceeds determinant bound {bound}")
    if r == 0:
        raise PolyError("empty matrix")
    # minors[mask] = det of rows 0..popcount(mask)-1 restricted to columns in mask
    minors = {0: None}
    for j in range(r):
        minors[1 << j] = M[0, j]
    for k in range(1, r):
        nxt = {}
        for mask, sub in minors.items():
            if mask == 0 or bin(mask).count("1") != k:
                continue
            for j in range(r):
                if mask & (1 << j):
                    continue
                newmask = mask | (1 << j)
                # sign: column j sits after the columns of mask below it
                above = bin(mask >> (j + 1)).count("1")
                term = mul(sub, M[k, j], cap)
                if above % 2:
                    term = -term
                nxt[newmask] = nxt[newmask] + term if newmask in nxt else term
        minors = nxt
    return minors[(1 << r) - 1]


def det_permutation(M: PolyMatrix) -> SparsePoly:
    """Leibniz expansion; exponential, used as an independent check."""
    r, _ = M.shape
    first = M[0, 0]
    total = SparsePoly.zero(first.ring, first.nvars)
    for perm in permutations(range(r)):
        inv = sum(1 for a in range(r) for b in range(a + 1, r) if perm[a] > perm[b])
        prod = SparsePoly.const(first.ring, first.nvars, first.ring.one)
        for i in range(r):
            prod = prod * M[i, perm[i]]
        total = total - prod if inv % 2 else total + prod
    return total


# ---------------------------------------------------------------------------
# substitution


def evaluate(f: SparsePoly, assignment: dict) -> SparsePoly:
    """Substitute x_j -> value for j in assignment; arity is kept."""
    if not assignment:
        return f
    ring = f.ring
    for v in assignment.values():
        if getattr(v, "ring", ring) != ring:
            raise PolyError(f"value {v!r} is not in {ring!r}")
    powers: dict = {}
    terms: dict = {}
    for e, c in f.terms.items():
        e2 = list(e)
        for j, v in assignment.items():
            k = e[j]
            if k:
                key = (j, k)
                if key not in powers:
                    powers[key] = v ** k
                c = c * powers[key]
                e2[j] = 0
        if not c:
            continue
        e2 = tuple(e2)
        prev = terms.get(e2)
        terms[e2] = c if prev is None else prev + c
    return SparsePoly(ring, f.nvars, terms)


def evaluate_at(f: SparsePoly, values):
    """Full evaluation at a point; returns a ring element."""
    if len(values) != f.nvars:
        raise PolyError(f"expected {f.nvars} values, got {len(values)}")
    ring = f.ring
    total = ring.zero
    cache: dict = {}
    for e, c in f.terms.items():
        term = c
        for j, k in enumerate(e):
            if k:
                key = (j, k)
                pw = cache.get(key)
                if pw is None:
                    pw = cache[key] = values[j] ** k
                term = term * pw
        total = total + term
    return total


def select_vars(f: SparsePoly, keep) -> SparsePoly:
    """Re-index onto the variables in `keep`; the others must not occur."""
    keep = list(keep)
    kept = set(keep)
    terms = {}
    for e, c in f.terms.items():
        if any(k for j, k in enumerate(e) if j not in kept):
            raise PolyError("polynomial depends on a dropped variable")
        terms[tuple(e[j] for j in keep)] = c
    return SparsePoly._raw(f.ring, len(keep), terms)


def embed_vars(f: SparsePoly, nvars: int, positions) -> SparsePoly:
    """Place variable i of f at position positions[i] of a wider ring."""
    terms = {}
    for e, c in f.terms.items():
        e2 = [0] * nvars
        for i, k in enumerate(e):
            e2[positions[i]] += k
        terms[tuple(e2)] = c
    return SparsePoly(f.ring, nvars, terms)


def kronecker_substitute(f: SparsePoly, D: int, check: bool = False) -> SparsePoly:
    """x^alpha -> z^(sum alpha_i D^i); injective on terms when D > deg f."""
    if check and D <= f.degree:
        raise KroneckerCollision(f"base {D} does not exceed degree {f.degree}")
    terms: dict = {}
    for e, c in f.terms.items():
        d = 0
        for k in reversed(e):
            d = d * D + k
        key = (d,)
        prev = terms.get(key)
        terms[key] = c if prev is None else prev + c
    return SparsePoly(f.ring, 1, terms)


def exp_vp(alpha, p: int):
    """min_i v_p(alpha_i) over the vector; math.inf for the zero vector."""
    v = math.inf
    for a in alpha:
        if a:
            w = 0
            while a % p == 0:
                a //= p
                w += 1
            if w < v:
                v = w
    return v


def reduce_exponents_mod(f: SparsePoly, q: int) -> SparsePoly:
    if q < 1:
        raise PolyError("modulus must be >= 1")
    terms: dict = {}
    for e, c in f.terms.items():
        key = tuple(k % q for k in e)
        prev = terms.get(key)
        terms[key] = c if prev is None else prev + c
    return SparsePoly(f.ring, f.nvars, terms)
