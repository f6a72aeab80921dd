"""Truncated p-typical Witt vectors.

Addition and multiplication come from the universal integer polynomials
S_i, P_i, derived once per prime by inverting the ghost map.  A second
"ghost" engine computes the same operations for coefficient rings of the
form F_p[u]/(g) by lifting to (Z/p^L)[u]/(g~) and solving the ghost
equations there; it has no length cap and serves as a cross-check.
"""

from __future__ import annotations

import threading
from math import comb
from dataclasses import dataclass

from .poly import SparsePoly, evaluate_at, select_vars
from .rings import ZZ, FqContext, GrContext, RingError, _QuotientRing

MAX_LEVEL = 4


class WittError(ValueError):
    pass


@dataclass(frozen=True)
class UniversalWittPolys:
    """S_i and P_i for one prime, in variables x_0..x_i, y_0..y_i."""

    p: int
    i: int
    S: SparsePoly
    P: SparsePoly

    @property
    def names(self):
        return [f"x{k}" for k in range(self.i + 1)] + [f"y{k}" for k in range(self.i + 1)]


_cache: dict = {}
_cache_lock = threading.Lock()


def _ghost(vars_, n, p):
    """w_n = sum_{j<=n} p^j v_j^{p^{n-j}} for a list of polynomials."""
    total = None
    for j in range(n + 1):
        term = (vars_[j] ** (p ** (n - j))).scale(p ** j)
        total = term if total is None else total + term
    return total


def _divide_exact(f: SparsePoly, d: int) -> SparsePoly:
    terms = {}
    for e, c in f.terms.items():
        q, rem = divmod(c, d)
        if rem:
            raise WittError(f"non-integral coefficient {c}/{d} in ghost inversion")
        terms[e] = q
    return SparsePoly(ZZ, f.nvars, terms)


def _derive(p: int, top: int):
    nv = 2 * (top + 1)
    X = [SparsePoly.var(ZZ, nv, k) for k in range(top + 1)]
    Y = [SparsePoly.var(ZZ, nv, top + 1 + k) for k in range(top + 1)]
    S, P = [], []
    for n in range(top + 1):
        wx, wy = _ghost(X, n, p), _ghost(Y, n, p)
        s_rhs, p_rhs = wx + wy, wx * wy
        for j in range(n):
            k = p ** (n - j)
            s_rhs = s_rhs - (S[j] ** k).scale(p ** j)
            p_rhs = p_rhs - (P[j] ** k).scale(p ** j)
        S.append(_divide_exact(s_rhs, p ** n))
        P.append(_divide_exact(p_rhs, p ** n))
    return S, P


def universal_witt_polys(p: int, i: int, max_level: int = MAX_LEVEL) -> UniversalWittPolys:
    if i < 0:
        raise WittError("level must be >= 0")
    if i > max_level:
        raise WittError(f"level {i} exceeds the configured maximum {max_level}")
    key = (p, i)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    S, P = _derive(p, i)
    keep = list(range(i + 1)) + [i + 1 + k for k in range(i + 1)]
    out = UniversalWittPolys(p, i, select_vars(S[i], keep), select_vars(P[i], keep))
    with _cache_lock:
        _cache.setdefault(key, out)
        # lower levels come for free
        for j in range(i):
            kj = list(range(j + 1)) + [i + 1 + k for k in range(j + 1)]
            _cache.setdefault((p, j), UniversalWittPolys(p, j, select_vars(S[j], kj),
                                                         select_vars(P[j], kj)))
    return _cache[key]


def _eval_int_poly(f: SparsePoly, values, ring):
    return ring.zero + evaluate_at(f, values)


# ---------------------------------------------------------------------------
# ghost engine


def _lift_ring(ring, L):
    """(Z/p^L)[u]/(g~) over the quotient ring F_p[u]/(g)."""
    if not isinstance(ring, _QuotientRing) or ring.N != ring.p:
        raise WittError(f"ghost engine needs a ring F_p[u]/(g), got {ring!r}")
    return _QuotientRing(ring.p, ring.p ** L, ring.modulus)


def _ghost_solve(ring, L, target):
    """Coordinates c_0..c_{L-1} in `ring` whose lifted ghost vector matches.

    target(n, lifted_coords_so_far) -> w_n in the lift ring.
    """
    p = ring.p
    big = _lift_ring(ring, L)
    N = big.N
    out = []
    for n in range(L):
        w = target(n)
        for j in range(n):
            w = w - out[j] ** (p ** (n - j)) * (p ** j)
        d = p ** n
        coords = []
        for c in w.coords:
            if c % d:
                raise WittError("ghost division not exact (lift inconsistent)")
            coords.append((c // d) % N)
        out.append(big._make(tuple(coords)))
    return [ring._make(tuple(c % p for c in x.coords)) for x in out]


def _ghost_vector(big, coords, n, p):
    total = big.zero
    for j in range(n + 1):
        total = total + coords[j] ** (p ** (n - j)) * (p ** j)
    return total


# ---------------------------------------------------------------------------


class WittVec:
    """Element of W_L(A) for a coefficient ring A.

    engine="universal" evaluates S_i, P_i (length capped by MAX_LEVEL+1);
    engine="ghost" lifts to a p-adic ring and works for any length when A is
    F_p[u]/(g).
    """

    __slots__ = ("ring", "coords", "p", "engine")

    def __init__(self, ring, coords, p: int | None = None, engine: str = "universal"):
        coords = tuple(coords)
        if not coords:
            raise WittError("Witt vectors need length >= 1")
        if engine not in ("universal", "ghost"):
            raise WittError(f"unknown engine {engine!r}")
        for c in coords:
            if getattr(c, "ring", ring) != ring:
                raise WittError("coordinates from different rings")
        self.ring = ring
        self.coords = coords
        self.p = p if p is not None else ring.p
        self.engine = engine

    @property
    def length(self) -> int:
        return len(self.coords)

    @classmethod
    def zero(cls, ring, length, **kw):
        return cls(ring, [ring.zero] * length, **kw)

    @classmethod
    def one(cls, ring, length, **kw):
        return cls.teichmuller(ring.one, length, **kw)

    @classmethod
    def teichmuller(cls, a, length, **kw):
        ring = a.ring
        return cls(ring, [a] + [ring.zero] * (length - 1), **kw)

    @classmethod
    def from_int(cls, ring, length, k: int, **kw):
        one = cls.one(ring, length, **kw)
        acc = cls.zero(ring, length, **kw)
        base = one if k >= 0 else -one
        for _ in range(abs(k)):
            acc = acc + base
        return acc

    def _check(self, other):
        if not isinstance(other, WittVec):
            raise WittError(f"expected WittVec, got {type(other).__name__}")
        if other.length != self.length:
            raise WittError(f"length mismatch: {self.length} vs {other.length}")
        if other.ring != self.ring:
            raise WittError("coefficient ring mismatch")

    def _like(self, coords):
        return WittVec(self.ring, coords, self.p, self.engine)

    def _universal(self, other, which):
        x = self.coords
        y = other.coords
        out = []
        for n in range(self.length):
            polys = universal_witt_polys(self.p, n)
            f = polys.S if which == "S" else polys.P
            out.append(_eval_int_poly(f, list(x[: n + 1]) + list(y[: n + 1]), self.ring))
        return self._like(out)

    def _ghost(self, other, op):
        L, p = self.length, self.p
        big = _lift_ring(self.ring, L)
        xa = [big._make(c.coords) for c in self.coords]
        xb = [big._make(c.coords) for c in other.coords] if other is not None else None

        def target(n):
            wa = _ghost_vector(big, xa, n, p)
            if op == "neg":
                return -wa
            wb = _ghost_vector(big, xb, n, p)
            return wa + wb if op == "add" else wa * wb

        return self._like(_ghost_solve(self.ring, L, target))

    def __add__(self, other):
        self._check(other)
        if self.engine == "ghost":
            return self._ghost(other, "add")
        return self._universal(other, "S")

    def __mul__(self, other):
        if isinstance(other, int):
            return self * WittVec.from_int(self.ring, self.length, other, p=self.p, engine=self.engine)
        self._check(other)
        if self.engine == "ghost":
            return self._ghost(other, "mul")
        return self._universal(other, "P")

    __rmul__ = __mul__

    def __neg__(self):
        if self.engine == "ghost":
            return self._ghost(None, "neg")
        # S_n(a, c) = a_n + c_n + (terms in lower coordinates): solve for c_n
        ring = self.ring
        c = []
        for n in range(self.length):
            S = universal_witt_polys(self.p, n).S
            val = _eval_int_poly(S, list(self.coords[: n + 1]) + c + [ring.zero], ring)
            c.append(-val)
        return self._like(c)

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, k: int):
        if k < 0:
            raise WittError("negative exponent")
        result = WittVec.one(self.ring, self.length, p=self.p, engine=self.engine)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, WittVec):
            return NotImplemented
        return self.ring == other.ring and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        return f"WittVec({[str(c) for c in self.coords]})"

    # structure maps
    def verschiebung(self, truncate: bool = False) -> "WittVec":
        """(a_0, a_1, ...) -> (0, a_0, a_1, ...); keeps the length if truncate."""
        coords = (self.ring.zero,) + self.coords
        return self._like(coords[:-1] if truncate else coords)

    def frobenius(self) -> "WittVec":
        ring = self.ring
        if getattr(ring, "characteristic", None) != self.p:
            raise WittError(f"Frobenius needs a ring of characteristic {self.p}")
        return self._like([c ** self.p for c in self.coords])

    def restrict(self) -> "WittVec":
        if self.length == 1:
            raise WittError("cannot restrict a length-1 vector")
        return self._like(self.coords[:-1])

    def with_engine(self, engine):
        return WittVec(self.ring, self.coords, self.p, engine)

    def to_json(self):
        return [self.ring.coeff_to_json(c) for c in self.coords]

    @classmethod
    def from_json(cls, ring, obj, **kw):
        return cls(ring, [ring.coeff_from_json(c) for c in obj], **kw)


def witt_to_galois(a: WittVec, gr: GrContext):
    """sum_i p^i [a_i^{p^-i}] in the Galois ring of matching precision."""
    if not isinstance(a.ring, FqContext):
        raise WittError("witt_to_galois needs coefficients in a finite field")
    if gr.m != a.length:
        raise WittError(f"precision {gr.m} does not match length {a.length}")
    if gr.base != a.ring:
        raise RingError("Galois ring does not lie over the coefficient field")
    p = a.p
    total = gr.zero
    for i, c in enumerate(a.coords):
        for _ in range(i):
            c = c.frobenius_inverse()
        total = total + gr.teichmuller(c) * (p ** i)
    return total


def multinomial(alpha) -> int:
    """(|alpha| choose alpha_1, ..., alpha_s)."""
    out, total = 1, 0
    for a in alpha:
        total += a
        out *= comb(total, a)
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for k in range(total + 1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


def teichmuller_expansion(monomials, length: int, **kw) -> WittVec:
    """[m_1 + ... + m_s] in W_length(A), expanded through multinomials.

    Each m_j is c_j * a^{alpha_j} with c_j in F_p (so Frobenius fixes it) and
    is given as an element of A.  With L = length - 1,

        [sum m_j] = sum_{|i| = p^L} p^{v - L} * binom(p^L; i) * V^{L-v} [prod m_j^{i_j / p^v}]

    where v = v_p(i).
    """
    ring = monomials[0].ring
    p = ring.p
    L = length - 1
    total = WittVec.zero(ring, length, **kw)
    for i in _compositions(p ** L, len(monomials)):
        v = min(_vp(k, p) for k in i if k)
        coeff = multinomial(i) // p ** (L - v)
        if multinomial(i) % p ** (L - v):
            raise WittError("multinomial not divisible as expected")
        m = ring.one
        for mj, k in zip(monomials, i):
            m = m * mj ** (k // p ** v)
        term = WittVec.teichmuller(m, length, **kw)
        for _ in range(L - v):
            term = term.verschiebung(truncate=True)
        total = total + term * coeff
    return total


def _vp(k: int, p: int) -> int:
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v
