"""Hitting sets for polynomials built from few sparse, low-degree inputs.

Points have the shape pi_I(b, c^{D^0 mod q}, ..., c^{D^{n-r-1} mod q}): the
entries of b go to the positions in I and the powers of c fill the other
positions in ascending order.  Exponents use 0^0 = 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .circuit import Circuit, circuit_eval
from .poly import SparsePoly, evaluate, evaluate_at, select_vars
from .rings import FqContext, fq_context, fq_embed, gr_context
from .wjcore import (choose_level, colex_subsets, is_degenerate, lift_poly,
                     witt_jacobian_independent, wjp)

ENUMERATION_CAP = 10 ** 7


class HittingError(ValueError):
    pass


class SearchExhausted(HittingError):
    pass


def ceil_log2(x: int) -> int:
    return max(x - 1, 0).bit_length()


def primes():
    """All primes, ascending, by an incremental sieve."""
    yield 2
    composites: dict = {}
    k = 3
    while True:
        step = composites.pop(k, None)
        if step is None:
            yield k
            composites[k * k] = 2 * k
        else:
            m = k + step
            while m in composites:
                m += step
            composites[m] = step
        k += 2


def primes_upto(N: int):
    for q in primes():
        if q > N:
            return
        yield q


def prime_count(N: int) -> int:
    return sum(1 for _ in primes_upto(N))


def lemma_sizes(n: int, r: int, s: int, delta: int):
    """(|S|, q_max, D) for the variable-reduction search."""
    D = r * delta ** (r + 1) + 1
    q_max = n ** 2 * (2 * delta * r * s) ** (4 * r * r * s) * ceil_log2(D) ** 2
    return q_max * D, q_max, D


@dataclass
class HittingParams:
    n: int
    r: int
    s: int
    delta: int
    d: int
    S1_size: int = 0
    S2_size: int = 0
    N: int = 0
    overridden: tuple = ()

    def __post_init__(self):
        if min(self.s, self.delta, self.r) < 1 or self.r > self.n or self.d < 0:
            raise HittingError("need s, delta, r >= 1, r <= n and d >= 0")

    @property
    def D(self) -> int:
        return self.r * self.delta ** (self.r + 1) + 1

    @property
    def mode(self) -> str:
        return "override" if self.overridden else "certified"

    @classmethod
    def from_formula(cls, n, r, s, delta, d, override_s1=None, override_s2=None, override_N=None):
        base = 2 * delta * r * s
        S1, S2, N = d + 1, n ** 2 * base ** (9 * r * r * s), n ** 2 * base ** (7 * r * r * s)
        over = []
        if override_s1 is not None:
            S1, over = override_s1, over + ["S1"]
        if override_s2 is not None:
            S2, over = override_s2, over + ["S2"]
        if override_N is not None:
            N, over = override_N, over + ["N"]
        return cls(n, r, s, delta, d, S1, S2, N, tuple(over))

    def cardinality(self) -> int:
        """Point count before duplicate collapsing."""
        if self.r == self.n:
            return self.S1_size ** self.n
        return comb(self.n, self.r) * self.S1_size ** self.r * self.S2_size * prime_count(self.N)


@dataclass
class HitPoint:
    coords: tuple
    I: tuple
    b: tuple
    c: object = None
    q: int | None = None

    def to_json(self):
        ring = self.coords[0].ring if self.coords else None
        return {"point": [ring.coeff_to_json(x) for x in self.coords],
                "I": [i + 1 for i in self.I],
                "c": ring.coeff_to_json(self.c) if self.c is not None else None,
                "q": self.q}


def substitution_exponents(D: int, q: int, count: int):
    if q < 2:
        raise HittingError("q must be >= 2")
    return [pow(D, i, q) for i in range(count)]


def substitution_point(c, D: int, q: int, count: int):
    """(c^{D^0 mod q}, ..., c^{D^{count-1} mod q}) with 0^0 = 1."""
    return [c ** k for k in substitution_exponents(D, q, count)]


def scatter(I, b, rest, n):
    """Place b at the positions I and rest, in order, at the others."""
    out = [None] * n
    for pos, val in zip(I, b):
        out[pos] = val
    it = iter(rest)
    for pos in range(n):
        if out[pos] is None:
            out[pos] = next(it)
    return tuple(out)


def _substitute_tail(g: SparsePoly, r: int, values) -> SparsePoly:
    h = evaluate(g, {r + i: v for i, v in enumerate(values)})
    return select_vars(h, range(r))


def preserve_nondegeneracy_search(g: SparsePoly, r: int, level: int, S, D: int | None = None,
                                  q_max: int | None = None):
    """First (c, q) (primes ascending, then S order) keeping g non-degenerate
    after x_{r+i} -> c^{D^i mod q}.  Returns (None, None) when n = r.
    """
    n = g.nvars
    if n == r:
        return None, None
    if D is None:
        D = max(g.degree + 1, 2)
    if q_max is None:
        q_max = (n * len(g) * ceil_log2(D)) ** 2
    S = [c for c in S if c.ring.is_unit(c)]
    for q in primes_upto(q_max):
        for c in S:
            h = _substitute_tail(g, r, substitution_point(c, D, q, n - r))
            if not is_degenerate(h, level).degenerate:
                return c, q
    raise SearchExhausted(f"no (c, q) with q <= {q_max} among {len(S)} candidates")


@dataclass
class Reduction:
    c: object
    q: int | None
    D: int
    fs: list
    level: int = 0
    extra: dict = field(default_factory=dict)


def variable_reduction_search(fs, S, q_max: int | None = None) -> Reduction:
    """Substitute x_{r+1..n} by powers of some c in S keeping fs independent.

    Assumes fs, x_{r+1}, ..., x_n are algebraically independent.  S is a list
    of elements of the field of fs; zero is skipped.
    """
    ctx = fs[0].ring
    n, r = fs[0].nvars, len(fs)
    delta = max(f.degree for f in fs)
    D = r * delta ** (r + 1) + 1
    if n == r:
        return Reduction(None, None, D, list(fs))
    s = max(len(f) for f in fs)
    level = choose_level(r, delta, ctx.p)
    gr = gr_context(ctx, level + 1)
    gs = [lift_poly(f, gr) for f in fs]
    g = wjp(gs, tuple(range(r)), level)
    if q_max is None:
        q_max = lemma_sizes(n, r, s, delta)[1]
    lifted = [gr.teichmuller(c) for c in S if c]
    back = {x: c for x, c in zip(lifted, [c for c in S if c])}
    c_lift, q = preserve_nondegeneracy_search(g, r, level, lifted, D, q_max)
    c = back[c_lift]
    vals = substitution_point(c, D, q, n - r)
    reduced = [_substitute_tail(f, r, vals) for f in fs]
    verdict = witt_jacobian_independent(reduced)
    if verdict.status != "independent":
        raise AssertionError("substituted system failed the independence re-check")
    return Reduction(c, q, D, reduced, level)


def first_elements(ctx: FqContext, k: int, nonzero: bool = False):
    it = ctx.elements_generator_order()
    if nonzero:
        next(it)
    out = list(itertools.islice(it, k))
    if len(out) < k:
        raise HittingError(f"field of order {ctx.order} has fewer than {k} suitable elements")
    return out


def hitting_set(params: HittingParams, ctx: FqContext, cap: int = ENUMERATION_CAP):
    """Lazily yield the hitting-set points (order: I colex, q, c, b)."""
    n, r = params.n, params.r
    if params.mode == "certified":
        # S2 and the primes only matter when some coordinates are substituted
        head = params.S1_size ** r * (params.S2_size if r < n else 1)
        if head > cap or (r < n and (params.N > cap or params.cardinality() > cap)):
            raise HittingError(f"formula sizes exceed the enumeration cap {cap}; supply overrides")
    S1 = first_elements(ctx, params.S1_size)
    if r == n:
        for b in itertools.product(S1, repeat=n):
            yield HitPoint(tuple(b), tuple(range(n)), tuple(b))
        return
    S2 = first_elements(ctx, params.S2_size, nonzero=True)
    D = params.D
    for I in colex_subsets(n, r):
        for q in primes_upto(params.N):
            for c in S2:
                rest = substitution_point(c, D, q, n - r)
                for b in itertools.product(S1, repeat=r):
                    yield HitPoint(scatter(I, b, rest, n), I, tuple(b), c, q)


def _embed_poly(f: SparsePoly, ctx: FqContext) -> SparsePoly:
    if f.ring == ctx:
        return f
    return f.map_coeffs(lambda c: fq_embed(c, ctx), ctx)


def hits(C: Circuit, fs, H, ctx: FqContext | None = None):
    """First point of H where C(f_1, ..., f_m) does not vanish, else None."""
    if C.nvars != len(fs):
        raise HittingError(f"circuit has {C.nvars} inputs but {len(fs)} polynomials given")
    embedded: dict = {}
    for point in H:
        target = point.coords[0].ring if point.coords else ctx
        fs_t = embedded.get(target)
        if fs_t is None:
            fs_t = embedded[target] = [_embed_poly(f, target) for f in fs]
        vals = [evaluate_at(f, point.coords) for f in fs_t]
        if circuit_eval(C, vals, coerce=lambda a: fq_embed(a, target)):
            return point
    return None


def working_field(p: int, size: int) -> FqContext:
    """Smallest F_{p^t} with at least `size` nonzero elements."""
    t = 1
    while p ** t - 1 < size:
        t += 1
    return fq_context(p, t)
