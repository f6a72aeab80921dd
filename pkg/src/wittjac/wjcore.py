"""The Witt-Jacobian independence criterion and its companions.

Levels: "level l" means working at precision m = l + 1, i.e. in the Galois
ring G_{l+1,t}, and WJP at level l is

    (g_1 ... g_r)^(p^l - 1) * prod_{j in I} x_j * det J_{x_I}(g).

Index sets are 0-based in Python and 1-based in JSON output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .poly import (SparsePoly, det_division_free, exp_vp, jacobian_matrix, mul,
                   poly_pow)
from .rings import FqContext, GrContext, fq_embed, gr_context, gr_val_p

TERM_CAP = 10 ** 6


class Refusal(Exception):
    """A driver declines to answer because its validity gate fails."""


class PrecisionError(ValueError):
    pass


@dataclass
class Witness:
    I: tuple
    alpha: tuple | None = None
    coeff_valuation: int | None = None
    threshold: int | None = None

    def to_json(self):
        return {"I": [i + 1 for i in self.I],
                "alpha": list(self.alpha) if self.alpha is not None else None,
                "coeff_valuation": self.coeff_valuation,
                "threshold": self.threshold}

    @classmethod
    def from_json(cls, obj):
        alpha = obj.get("alpha")
        return cls(tuple(i - 1 for i in obj["I"]), tuple(alpha) if alpha is not None else None,
                   obj.get("coeff_valuation"), obj.get("threshold"))


@dataclass
class IndependenceVerdict:
    """status is one of independent, dependent, inconclusive."""

    status: str
    method: str
    level: int | None = None
    witness: Witness | None = None
    detail: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def independent(self) -> bool | None:
        if self.status == "inconclusive":
            return None
        return self.status == "independent"

    def to_json(self):
        out = {"independent": self.independent, "status": self.status, "method": self.method,
               "level": self.level,
               "witness": self.witness.to_json() if self.witness else None}
        if self.detail:
            out["detail"] = self.detail
        out.update(self.extra)
        return out

    @classmethod
    def from_json(cls, obj):
        known = {"independent", "status", "method", "level", "witness", "detail"}
        w = obj.get("witness")
        return cls(obj["status"], obj["method"], obj.get("level"),
                   Witness.from_json(w) if w else None, obj.get("detail", ""),
                   {k: v for k, v in obj.items() if k not in known})


@dataclass
class DegeneracyResult:
    degenerate: bool
    alpha: tuple | None = None
    coeff_valuation: int | None = None
    threshold: int | None = None


def choose_level(r: int, delta: int, p: int) -> int:
    """Largest l with p^l <= delta^r (exact integer arithmetic)."""
    if delta < 1:
        raise ValueError("degree must be >= 1; handle constants separately")
    if r < 1:
        raise ValueError("r must be >= 1")
    bound = delta ** r
    level, pw = 0, p
    while pw <= bound:
        level += 1
        pw *= p
    return level


def lift_poly(f: SparsePoly, gr: GrContext) -> SparsePoly:
    """Embed coefficients into the residue field of gr and lift coordinate-wise."""
    base = gr.base
    return SparsePoly(gr, f.nvars, {e: gr.lift(fq_embed(c, base)) for e, c in f.terms.items()})


def reduce_poly(g: SparsePoly) -> SparsePoly:
    gr = g.ring
    return SparsePoly(gr.base, g.nvars, {e: c.reduce_mod_p() for e, c in g.terms.items()})


def _x_monomial(ring, n, I):
    e = [0] * n
    for j in I:
        e[j] = 1
    return SparsePoly.monomial(ring, n, e)


def jacobian_det_times_xI(gs, I, cap=TERM_CAP) -> SparsePoly:
    """prod_{j in I} x_j * det J_{x_I}(g)."""
    det = det_division_free(jacobian_matrix(gs, I), cap=cap)
    return mul(_x_monomial(gs[0].ring, gs[0].nvars, I), det)


def wjp(gs, I, level: int, cap: int = TERM_CAP) -> SparsePoly:
    """Witt-Jacobian polynomial at `level` over the lifted inputs gs."""
    I = tuple(I)
    ring = gs[0].ring
    if len(I) != len(gs):
        raise ValueError(f"|I| = {len(I)} but {len(gs)} polynomials")
    m = getattr(ring, "m", None)
    if m is None or m < level + 1:
        raise PrecisionError(f"level {level} needs precision >= {level + 1}, ring has {m}")
    jac = jacobian_det_times_xI(gs, I, cap)
    if not jac:
        return jac
    prod = gs[0]
    for g in gs[1:]:
        prod = mul(prod, g, cap)
    power = poly_pow(prod, ring.p ** level - 1, cap)
    return mul(power, jac, cap)


def _log_floor(x: int, p: int) -> int:
    k, pw = 0, p
    while pw <= x:
        k += 1
        pw *= p
    return k


def is_degenerate(f: SparsePoly, level: int | None = None, mode: str = "bounded") -> DegeneracyResult:
    """Check p^{min(v_p(alpha), level)+1} | coeff of x^alpha for every term.

    mode="unbounded" uses the cap floor(log_p deg f), which is never binding
    for nonzero alpha.  Terms are scanned in ascending graded-lex order and
    the first failing term is reported.
    """
    if not f:
        return DegeneracyResult(True)
    ring = f.ring
    p, m = ring.p, ring.m
    if mode == "bounded":
        if level is None:
            raise ValueError("bounded mode needs a level")
        cap = level
        if m < level + 1:
            raise PrecisionError(f"bounded test at level {level} needs precision {level + 1}, have {m}")
    elif mode == "unbounded":
        cap = _log_floor(max(f.degree, 1), p)
        need = max(min(exp_vp(a, p), cap) + 1 for a in f.terms)
        if m < need:
            raise PrecisionError(f"unbounded test needs precision {need}, have {m}")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for alpha, c in reversed(f.sorted_terms()):
        thr = min(exp_vp(alpha, p), cap) + 1
        v = gr_val_p(c)
        if v < thr:
            return DegeneracyResult(False, alpha, v, thr)
    return DegeneracyResult(True)


def colex_subsets(n: int, r: int):
    return sorted(combinations(range(n), r), key=lambda I: tuple(reversed(I)))


def _check_inputs(fs):
    if not fs:
        raise ValueError("need at least one polynomial")
    ring, n = fs[0].ring, fs[0].nvars
    for f in fs:
        if f.ring != ring or f.nvars != n:
            raise ValueError("polynomials must share ring and arity")
    if not isinstance(ring, FqContext):
        raise ValueError(f"inputs must be over a finite field, got {ring!r}")
    return ring, n


def witt_jacobian_independent(fs, level: int | None = None, cap: int = TERM_CAP,
                              extension=None) -> IndependenceVerdict:
    """Decide algebraic independence of fs over F_{p^e}.

    `extension` optionally names a larger FqContext to lift through.
    """
    field_, n = _check_inputs(fs)
    r = len(fs)
    if any(f.is_constant() for f in fs):
        return IndependenceVerdict("dependent", "wj", detail="constant input")
    if r > n:
        return IndependenceVerdict("dependent", "wj", detail="more polynomials than variables")
    delta = max(f.degree for f in fs)
    p = field_.p
    if level is None:
        level = choose_level(r, delta, p)
    gr = gr_context(extension or field_, level + 1)
    gs = [lift_poly(f, gr) for f in fs]
    for I in colex_subsets(n, r):
        W = wjp(gs, I, level, cap)
        res = is_degenerate(W, level)
        if not res.degenerate:
            return IndependenceVerdict("independent", "wj", level,
                                       Witness(I, res.alpha, res.coeff_valuation, res.threshold))
    return IndependenceVerdict("dependent", "wj", level)


def classical_jacobian_independent(fs) -> IndependenceVerdict:
    """Rank test on the Jacobian over F_{p^e}; valid only when p > delta^r."""
    field_, n = _check_inputs(fs)
    r = len(fs)
    delta = max(max(f.degree, 0) for f in fs)
    if field_.p <= delta ** r:
        raise Refusal(f"characteristic {field_.p} <= delta^r = {delta ** r}; "
                      "use the Witt-Jacobian criterion")
    if r > n:
        return IndependenceVerdict("dependent", "jacobian", detail="more polynomials than variables")
    for I in colex_subsets(n, r):
        if det_division_free(jacobian_matrix(fs, I)):
            return IndependenceVerdict("independent", "jacobian", witness=Witness(I))
    return IndependenceVerdict("dependent", "jacobian")


def padic_precision(r: int, delta: int, p: int) -> int:
    return _log_floor(max(r * delta, 1), p) + 2


def padic_jacobian_necessity(fs, I=None) -> IndependenceVerdict:
    """One-sided screen: a non-degenerate x_I * det J_{x_I}(g) proves independence."""
    field_, n = _check_inputs(fs)
    r = len(fs)
    if r > n or any(f.is_constant() for f in fs):
        return IndependenceVerdict("inconclusive", "padic", detail="trivially degenerate")
    delta = max(f.degree for f in fs)
    m = padic_precision(r, delta, field_.p)
    gr = gr_context(field_, m)
    gs = [lift_poly(f, gr) for f in fs]
    subsets = [tuple(I)] if I is not None else colex_subsets(n, r)
    for J in subsets:
        res = is_degenerate(jacobian_det_times_xI(gs, J), mode="unbounded")
        if not res.degenerate:
            return IndependenceVerdict("independent", "padic",
                                       witness=Witness(J, res.alpha, res.coeff_valuation, res.threshold),
                                       extra={"precision": m})
    return IndependenceVerdict("inconclusive", "padic", extra={"precision": m})
