"""Exact arithmetic in F_p[u]/(g), finite fields F_{p^t} and Galois rings.

All rings here are quotients (Z/N)[x]/(h) with h monic of degree t, and
elements are stored as coordinate tuples (c_0, ..., c_{t-1}) in the power
basis, little-endian.  N = p for the fields, N = p^m for Galois rings.

Contexts are immutable and compare by value, so elements built from two
separately constructed but equal contexts interoperate.
"""

from __future__ import annotations

import itertools
from functools import cached_property, lru_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def vp_int(n: int, p: int) -> int | None:
    """p-adic valuation of an integer; None stands for infinity (n == 0)."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class RingError(ValueError):
    pass


def _mulmod(a, b, modulus, N):
    t = len(a)
    if t == 1:
        return ((a[0] * b[0]) % N,)
    prod = [0] * (2 * t - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for k in range(2 * t - 2, t - 1, -1):
        c = prod[k] % N
        if c:
            base = k - t
            for j in range(t):
                prod[base + j] -= c * modulus[j]
    return tuple(x % N for x in prod[:t])


class QElem:
    """Element of a quotient ring (Z/N)[x]/(h)."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring, coords):
        self.ring = ring
        self.coords = coords

    def _coerce(self, other):
        if isinstance(other, QElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingError(f"context mismatch: {self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        N = self.ring.N
        return self.ring._make(tuple((x + y) % N for x, y in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        N = self.ring.N
        return self.ring._make(tuple((x - y) % N for x, y in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        N = self.ring.N
        return self.ring._make(tuple((-x) % N for x in self.coords))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = self.ring
        return r._make(_mulmod(self.coords, o.coords, r.modulus, r.N))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __bool__(self):
        return any(self.coords)

    def __eq__(self, other):
        if isinstance(other, QElem):
            return self.coords == other.coords and self.ring == other.ring
        if isinstance(other, int):
            return self == self.ring.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"{type(self).__name__}({list(self.coords)})"

    def __str__(self):
        return self.ring.coeff_to_text(self)

    @property
    def code(self) -> int:
        """Integer encoding sum c_i N^i, handy as a table index."""
        N = self.ring.N
        out = 0
        for c in reversed(self.coords):
            out = out * N + c
        return out

    def inverse(self):
        return self.ring.inverse(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()


class _QuotientRing:
    """(Z/N)[x]/(modulus) with modulus monic; shared machinery."""

    element_class = QElem

    def __init__(self, p: int, N: int, modulus):
        if not is_prime(p):
            raise RingError(f"{p} is not prime")
        modulus = tuple(int(c) % N for c in modulus)
        if len(modulus) < 2 or modulus[-1] != 1:
            raise RingError("modulus must be monic of degree >= 1")
        self.p = p
        self.N = N
        self.modulus = modulus
        self.t = len(modulus) - 1

    def _key(self):
        return (type(self).__name__, self.N, self.modulus)

    def __eq__(self, other):
        return isinstance(other, _QuotientRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def characteristic(self) -> int:
        return self.N

    @property
    def size(self) -> int:
        return self.N ** self.t

    def _make(self, coords):
        return self.element_class(self, coords)

    def element(self, coords) -> QElem:
        coords = [int(c) % self.N for c in coords]
        if len(coords) > self.t:
            raise RingError(f"expected at most {self.t} coordinates, got {len(coords)}")
        coords += [0] * (self.t - len(coords))
        return self._make(tuple(coords))

    def from_int(self, k: int) -> QElem:
        return self._make((k % self.N,) + (0,) * (self.t - 1))

    @cached_property
    def zero(self):
        return self.from_int(0)

    @cached_property
    def one(self):
        return self.from_int(1)

    @cached_property
    def x(self):
        """Class of the polynomial variable."""
        if self.t == 1:
            return self.from_int(-self.modulus[0])
        return self.element([0, 1])

    def from_code(self, code: int) -> QElem:
        coords = []
        for _ in range(self.t):
            code, c = divmod(code, self.N)
            coords.append(c)
        return self._make(tuple(coords))

    def elements(self):
        """All elements, in code order."""
        for coords in itertools.product(range(self.N), repeat=self.t):
            yield self._make(tuple(reversed(coords)))

    def random(self, rng) -> QElem:
        return self._make(tuple(rng.randrange(self.N) for _ in range(self.t)))

    # text / json coefficient syntax
    def coeff_to_json(self, c: QElem):
        return list(c.coords)

    def coeff_from_json(self, obj) -> QElem:
        if isinstance(obj, int):
            return self.from_int(obj)
        return self.element(obj)

    def coeff_to_text(self, c: QElem) -> str:
        if self.t == 1:
            return str(c.coords[0])
        return "[" + ",".join(str(x) for x in c.coords) + "]"

    def parse_coeff(self, s: str) -> QElem:
        s = s.strip()
        if s.startswith("["):
            if not s.endswith("]"):
                raise RingError(f"bad coefficient {s!r}")
            body = s[1:-1].strip()
            items = [int(x) for x in body.split(",")] if body else []
            return self.element(items)
        return self.from_int(int(s))

    def inverse(self, a):
        raise RingError(f"inversion not supported in {self!r}")


class QuotientRing(_QuotientRing):
    """F_p[u]/(g) for an arbitrary monic g; used for non-perfect test rings."""

    def __init__(self, p: int, modulus):
        super().__init__(p, p, modulus)

    def __repr__(self):
        return f"QuotientRing(p={self.p}, modulus={list(self.modulus)})"

    def frobenius(self, a):
        return a ** self.p


# ---------------------------------------------------------------------------
# finite fields


class FqElem(QElem):
    __slots__ = ()

    def frobenius(self) -> "FqElem":
        return self ** self.ring.p

    def frobenius_inverse(self) -> "FqElem":
        """The unique b with b^p = self (F_{p^t} is perfect)."""
        return self ** (self.ring.p ** (self.ring.t - 1))


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    """Remainder of a by nonzero b over F_p; both low-first lists."""
    a = _poly_trim(a)
    b = _poly_trim(b)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = (a[-1] * inv) % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _poly_trim(a)
    return a


def _poly_gcd(a, b, p):
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_irreducible(modulus, p: int) -> bool:
    """Ben-Or test over F_p: gcd(h, x^{p^i} - x) = 1 for i <= t/2."""
    h = [c % p for c in modulus]
    t = len(h) - 1
    if t == 1:
        return True
    ring = QuotientRing(p, h)
    xp = ring.element([0, 1])
    for _ in range(t // 2):
        xp = xp ** p
        diff = list(xp.coords)
        diff[1] = (diff[1] - 1) % p
        if len(_poly_gcd(h, diff, p)) != 1:
            return False
    return True


class FqContext(_QuotientRing):
    """F_{p^t} = F_p[x]/(modulus) with a fixed primitive element."""

    element_class = FqElem

    def __init__(self, p: int, modulus, generator_coords=None):
        super().__init__(p, p, modulus)
        if not is_irreducible(self.modulus, p):
            raise RingError(f"modulus {list(self.modulus)} is reducible over F_{p}")
        if generator_coords is None:
            # the class of x when it is primitive, else the first primitive element
            cands = itertools.chain([self.x], self.elements())
            self.generator = next(g for g in cands if self.is_primitive(g))
        else:
            self.generator = self.element(generator_coords)
            if not self.is_primitive(self.generator):
                raise RingError("generator is not primitive")

    def __repr__(self):
        return f"FqContext(p={self.p}, t={self.t}, modulus={list(self.modulus)})"

    @property
    def order(self) -> int:
        return self.N ** self.t

    def is_primitive(self, g) -> bool:
        q1 = self.order - 1
        if not g or g ** q1 != self.one:
            return False
        return all(g ** (q1 // ell) != self.one for ell in prime_factors(q1))

    def inverse(self, a):
        if not a:
            raise ZeroDivisionError("inversion of zero in " + repr(self))
        return a ** (self.order - 2)

    def elements_generator_order(self):
        """0, 1, g, g^2, ..., g^{q-2}."""
        yield self.zero
        z = self.one
        for _ in range(self.order - 1):
            yield z
            z = z * self.generator


def _is_primitive_modulus(p, lower):
    t = len(lower)
    ring = QuotientRing(p, tuple(lower) + (1,))
    x = ring.x
    q1 = p ** t - 1
    if x ** q1 != ring.one:
        return False
    return all(x ** (q1 // ell) != ring.one for ell in prime_factors(q1))


@lru_cache(maxsize=None)
def fq_context(p: int, t: int = 1, modulus: tuple | None = None) -> FqContext:
    """Deterministic F_{p^t}.

    Without an explicit modulus, picks the smallest monic primitive polynomial,
    ordering candidates by sum_{i<t} c_i p^i (highest coefficient most
    significant); the generator is then the class of x.
    """
    if not is_prime(p):
        raise RingError(f"{p} is not prime")
    if t < 1:
        raise RingError("extension degree must be >= 1")
    if modulus is not None:
        return FqContext(p, modulus)
    for code in range(p ** t):
        lower = []
        for _ in range(t):
            code, c = divmod(code, p)
            lower.append(c)
        if lower[0] == 0:
            continue
        if _is_primitive_modulus(p, lower):
            x = QuotientRing(p, tuple(lower) + (1,)).x
            return FqContext(p, tuple(lower) + (1,), generator_coords=x.coords)
    raise RingError(f"no primitive polynomial of degree {t} over F_{p} found")


@lru_cache(maxsize=None)
def _embedding_root(src: FqContext, target: FqContext):
    for z in target.elements():
        acc = target.zero
        for c in reversed(src.modulus):
            acc = acc * z + c
        if not acc:
            return z
    raise RingError(f"{src!r} does not embed into {target!r}")


def fq_embed(a: FqElem, target: FqContext) -> FqElem:
    """Image of a under the fixed embedding F_{p^e} -> F_{p^t}, e | t.

    The class of x is sent to the first root (in code order) of the source
    modulus inside the target field.
    """
    src = a.ring
    if src == target:
        return target._make(a.coords)
    if src.p != target.p or target.t % src.t:
        raise RingError(f"cannot embed F_{src.p}^{src.t} into F_{target.p}^{target.t}")
    rho = _embedding_root(src, target)
    acc = target.zero
    for c in reversed(a.coords):
        acc = acc * rho + c
    return acc


# ---------------------------------------------------------------------------
# Galois rings


class GrElem(QElem):
    __slots__ = ()

    def reduce_mod_p(self) -> FqElem:
        base = self.ring.base
        return base._make(tuple(c % base.p for c in self.coords))

    def val_p(self) -> int:
        return gr_val_p(self)


class GrContext(_QuotientRing):
    """Galois ring (Z/p^m)[x]/(h) lying over an FqContext.

    h is the coordinate-wise lift of the base modulus and xi the Teichmuller
    lift of the class of x, a primitive (p^t - 1)-th root of unity.
    """

    element_class = GrElem

    def __init__(self, base: FqContext, m: int):
        if m < 1:
            raise RingError("precision must be >= 1")
        super().__init__(base.p, base.p ** m, base.modulus)
        self.base = base
        self.m = m
        self.lift_modulus = self.modulus
        self.xi = self.teichmuller(base.x)
        q1 = base.order - 1
        one = self.one
        if self.xi ** q1 != one or any(self.xi ** (q1 // ell) == one for ell in prime_factors(q1)):
            raise RingError("xi is not a primitive root of unity; base modulus not primitive?")

    def _key(self):
        return ("GrContext", self.N, self.modulus)

    def __repr__(self):
        return f"GrContext(p={self.p}, m={self.m}, t={self.t}, modulus={list(self.modulus)})"

    def lift(self, a: FqElem) -> GrElem:
        """Coordinate-wise lift F_{p^t} -> G; a section of reduce_mod_p."""
        if a.ring != self.base:
            raise RingError(f"cannot lift element of {a.ring!r} into {self!r}")
        return self._make(a.coords)

    def teichmuller(self, a: FqElem) -> GrElem:
        z = self.lift(a)
        q = self.base.order
        # z -> z^q contracts p-adically: m - 1 steps reach the fixed point
        for _ in range(self.m - 1):
            z = z ** q
        return z

    def inverse(self, a):
        return gr_unit_inv(a)

    def is_unit(self, a) -> bool:
        return any(c % self.p for c in a.coords)


@lru_cache(maxsize=None)
def gr_context(base: FqContext, m: int) -> GrContext:
    return GrContext(base, m)


def gr_teichmuller(a: FqElem, gr: GrContext) -> GrElem:
    return gr.teichmuller(a)


def gr_val_p(a: GrElem) -> int:
    """Largest v <= m with a in p^v G."""
    ring = a.ring
    v = ring.m
    for c in a.coords:
        if c:
            w = vp_int(c, ring.p)
            if w < v:
                v = w
    return v


def gr_unit_inv(a: GrElem) -> GrElem:
    ring = a.ring
    abar = a.reduce_mod_p()
    if not abar:
        raise ZeroDivisionError(f"{a!r} lies in the ideal (p) of {ring!r}")
    b = ring.lift(abar.inverse())
    two = ring.from_int(2)
    # Newton: precision doubles each step
    prec = 1
    while prec < ring.m:
        b = b * (two - a * b)
        prec *= 2
    return b


# ---------------------------------------------------------------------------
# integers, for universal polynomials


class IntegerRing:
    """Z with Python ints as elements."""

    characteristic = 0
    zero = 0
    one = 1

    def from_int(self, k: int) -> int:
        return k

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("ZZ")

    def __repr__(self):
        return "ZZ"

    def coeff_to_json(self, c):
        return c

    def coeff_from_json(self, obj):
        return int(obj)

    def coeff_to_text(self, c):
        return str(c)

    def parse_coeff(self, s):
        return int(s)

    def random(self, rng):
        return rng.randrange(-9, 10)


ZZ = IntegerRing()
