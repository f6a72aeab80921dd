"""Command-line front end.

Exit codes: 0 independent / nonzero hit, 1 dependent / identically zero,
2 refusal or inconclusive, 3 and above errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

import numpy as np

from .circuit import CircuitBuilder, CircuitError, circuit_eval, degree_bound, parse_circuit
from .exhaustive import GaloisArray, universal_fits
from .hitting import HittingError, HittingParams, hitting_set, working_field
from .interp import InterpError, algo5_independence, choose_t, interp_coeffs, xi_powers, _lift_circuit
from .oracle import OracleCapExceeded, independence_oracle
from .poly import PolyError, SparsePoly, TermCapExceeded
from .problem import ProblemError, load_problem, problem_from_polys
from .rings import RingError, fq_context, fq_embed, gr_context
from .witt import WittError, WittVec
from .wjcore import (IndependenceVerdict, PrecisionError, Refusal, classical_jacobian_independent,
                     is_degenerate, lift_poly, padic_jacobian_necessity, witt_jacobian_independent,
                     wjp)

EXIT_OK, EXIT_NO, EXIT_UNDECIDED, EXIT_ERROR, EXIT_DISAGREE = 0, 1, 2, 3, 4

METHODS = ("wj", "jacobian", "perron", "padic", "algo5")


def _emit(obj, as_json, text=None, out=None):
    out = out or sys.stdout
    if as_json:
        print(json.dumps(obj, sort_keys=True), file=out)
    else:
        print(text if text is not None else obj, file=out)


def _exit_for(v: IndependenceVerdict) -> int:
    return {"independent": EXIT_OK, "dependent": EXIT_NO}.get(v.status, EXIT_UNDECIDED)


def run_method(method, prob, mode="exhaustive"):
    """One verdict; refusals come back as status 'refused'."""
    try:
        if method == "wj":
            return witt_jacobian_independent(prob.polynomials())
        if method == "jacobian":
            return classical_jacobian_independent(prob.polynomials())
        if method == "perron":
            return independence_oracle(prob.polynomials())
        if method == "padic":
            return padic_jacobian_necessity(prob.polynomials())
        if method == "algo5":
            return algo5_independence(prob.as_circuits(), mode)
    except (Refusal, OracleCapExceeded, InterpError, TermCapExceeded) as exc:
        return IndependenceVerdict("refused", method, detail=str(exc))
    raise ValueError(f"unknown method {method!r}")


def cmd_indep(args) -> int:
    prob = load_problem(args.file)
    if prob.precision is not None:
        raise ProblemError("independence tests take polynomials over F_{p^e}; drop 'precision'")
    mode = args.mode.replace("-", "_")
    if args.method != "all":
        v = run_method(args.method, prob, mode)
        _emit(v.to_json(), args.json, f"{v.method}: {v.status}" + (f" ({v.detail})" if v.detail else ""))
        return _exit_for(v)
    verdicts = {m: run_method(m, prob, mode) for m in METHODS}
    decisive = {m: v.status for m, v in verdicts.items() if v.status in ("independent", "dependent")}
    # the p-adic screen is one-sided: only an "independent" answer counts
    agree = len(set(decisive.values())) <= 1
    report = {"agree": agree, "verdicts": {m: v.to_json() for m, v in verdicts.items()}}
    if not agree:
        report["failure"] = {"input": prob.to_text(), "statuses": decisive}
        _emit(report, True)
        return EXIT_DISAGREE
    status = next(iter(decisive.values()), "inconclusive")
    report["status"] = status
    lines = [f"{m}: {v.status}" for m, v in verdicts.items()] + [f"overall: {status}"]
    _emit(report, args.json, "\n".join(lines))
    return {"independent": EXIT_OK, "dependent": EXIT_NO}.get(status, EXIT_UNDECIDED)


def _parse_indices(text, n):
    try:
        idx = [int(x) - 1 for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}") from None
    if any(not 0 <= i < n for i in idx) or sorted(set(idx)) != idx:
        raise ValueError(f"index set {text!r} must be increasing within 1..{n}")
    return tuple(idx)


def _lifted(prob, precision):
    if prob.precision is not None:
        if prob.precision < precision:
            raise PrecisionError(f"file precision {prob.precision} below required {precision}")
        return prob.polynomials()
    gr = gr_context(prob.base_field, precision)
    return [lift_poly(f, gr) for f in prob.polynomials()]


def cmd_wjp(args) -> int:
    prob = load_problem(args.file)
    gs = _lifted(prob, args.precision or args.level + 1)
    I = _parse_indices(args.index_set, prob.n) if args.index_set else tuple(range(len(gs)))
    W = wjp(gs, I, args.level)
    res = is_degenerate(W, args.level)
    obj = {"wjp": W.to_json(), "text": W.to_text(prob.vars), "level": args.level,
           "precision": W.ring.m, "I": [i + 1 for i in I], "degenerate": res.degenerate}
    _emit(obj, args.json, W.to_text(prob.vars))
    return EXIT_OK


def cmd_degeneracy(args) -> int:
    prob = load_problem(args.file)
    f = prob.polynomials()[0]
    if prob.precision is None:
        if args.level is None:
            raise ValueError("--level is required when the file has no precision")
        f = _lifted(prob, args.level + 1)[0]
    mode = args.mode
    res = is_degenerate(f, args.level, mode)
    obj = {"degenerate": res.degenerate, "mode": mode, "level": args.level,
           "alpha": list(res.alpha) if res.alpha else None,
           "coeff_valuation": res.coeff_valuation, "threshold": res.threshold}
    _emit(obj, args.json, "degenerate" if res.degenerate else
          f"not degenerate at alpha={list(res.alpha)} (valuation {res.coeff_valuation} < {res.threshold})")
    # a non-degenerate WJP is the independence witness, so it maps to 0
    return EXIT_NO if res.degenerate else EXIT_OK


def cmd_hitting_set(args) -> int:
    params = HittingParams.from_formula(args.n, args.r, args.s, args.delta, args.d,
                                        args.override_s1, args.override_s2, args.override_N)
    if args.t:
        ctx = fq_context(args.p, args.t)
    else:
        need = max(params.S1_size, params.S2_size + 1)
        ctx = working_field(args.p, need - 1)
    count = 0
    for pt in hitting_set(params, ctx):
        print(json.dumps(pt.to_json()))
        count += 1
        if args.limit and count >= args.limit:
            break
    print(json.dumps({"summary": True, "cardinality": count, "mode": params.mode,
                      "field": {"p": ctx.p, "t": ctx.t, "modulus": list(ctx.modulus)}}))
    return EXIT_OK


def cmd_coeff(args) -> int:
    base = fq_context(args.p, args.e)
    ring = gr_context(base, args.precision) if args.precision > 1 else base
    with open(args.circuit) as fh:
        C = parse_circuit(fh.read(), ring)
    alpha = [int(x) for x in args.alpha.split(",")]
    if len(alpha) != C.nvars or min(alpha) < 0:
        raise ValueError(f"alpha needs {C.nvars} nonnegative entries")
    D = max(degree_bound(C) + 1, 2)
    t = choose_t(args.e, D, C.nvars, args.p)
    gr = gr_context(fq_context(args.p, t), args.precision)
    if args.precision > 1:
        b = CircuitBuilder(gr, C.nvars)
        lifted = b.build(b.embed(C, [b.var(j) for j in range(C.nvars)],
                                 coerce=lambda c: embed_galois(c, gr)))
    else:
        lifted = _lift_circuit(C, gr)
    pw = xi_powers(gr)
    q1 = len(pw)
    j = np.arange(q1)
    if any(a >= D for a in alpha):
        c = gr.zero
    else:
        vals = circuit_eval(lifted, [pw[(j * D ** i) % q1] for i in range(C.nvars)])
        if not isinstance(vals, GaloisArray):
            vals = GaloisArray.full(gr, q1, vals)
        c = interp_coeffs(vals, [sum(a * D ** i for i, a in enumerate(alpha))]).to_elems()[0]
    c = restrict_galois(c, ring)
    obj = {"alpha": alpha, "coeff": ring.coeff_to_json(c), "D": D, "t": t, "precision": args.precision}
    _emit(obj, args.json, ring.coeff_to_text(c))
    return EXIT_OK if c else EXIT_NO


def embed_galois(a, gr):
    """Image of a in G_{m,e} under the canonical embedding into G_{m,t}.

    Writes a = sum p^k T(a_k) in Teichmuller digits; T commutes with the
    residue-field embedding, so the digits map one by one.
    """
    src = a.ring
    if src == gr:
        return a
    p = src.p
    total = gr.zero
    cur = list(a.coords)
    for k in range(src.m):
        digit = src.base._make(tuple(x % p for x in cur))
        total = total + gr.teichmuller(fq_embed(digit, gr.base)) * (p ** k)
        mod = p ** (src.m - k)
        cur = [((x - y) % mod) // p for x, y in zip(cur, src.teichmuller(digit).coords)]
    return total


def restrict_galois(c, ring):
    """Inverse of embed_galois: the element of `ring` (G_{m,e} or F_{p^e})
    mapping to c.  Raises ValueError when c lies outside the image."""
    gr = c.ring
    base = getattr(ring, "base", ring)
    back = {fq_embed(a, gr.base): a for a in base.elements()}
    p = gr.p
    total = ring.zero
    cur = list(c.coords)
    for k in range(gr.m):
        digit = gr.base._make(tuple(x % p for x in cur))
        if digit not in back:
            raise ValueError("coefficient does not lie in the input ring")
        a = back[digit]
        total = total + (ring.teichmuller(a) if ring is not base else a) * (p ** k)
        mod = p ** (gr.m - k)
        cur = [((x - y) % mod) // p for x, y in zip(cur, gr.teichmuller(digit).coords)]
    return total


def cmd_witt_demo(args) -> int:
    ctx = fq_context(args.p, args.t)
    L = args.len
    size = ctx.order ** L
    if size > 64:
        raise ValueError(f"W_{L}(F_{ctx.order}) has {size} elements; demo tables stop at 64")
    engine = "universal" if universal_fits(args.p, L) else "ghost"
    import itertools
    vecs = [WittVec(ctx, list(reversed(c)), engine=engine)
            for c in itertools.product(list(ctx.elements()), repeat=L)]
    vecs.sort(key=lambda v: sum(c.code * ctx.order ** i for i, c in enumerate(v.coords)))
    label = {v.coords: str(i) for i, v in enumerate(vecs)}
    add = [[label[(a + b).coords] for b in vecs] for a in vecs]
    mul = [[label[(a * b).coords] for b in vecs] for a in vecs]
    if args.json:
        _emit({"elements": [v.to_json() for v in vecs], "add": add, "mul": mul}, True)
        return EXIT_OK
    print("elements:")
    for i, v in enumerate(vecs):
        print(f"  {i}: {v.to_json()}")
    for name, tab in (("+", add), ("*", mul)):
        print(f"table {name}:")
        for row in tab:
            print("  " + " ".join(f"{x:>2}" for x in row))
    return EXIT_OK


def cmd_algo5(args) -> int:
    prob = load_problem(args.circuits)
    v = algo5_independence(prob.as_circuits(), args.mode.replace("-", "_"))
    _emit(v.to_json(), args.json, f"algo5 ({args.mode}): {v.status}")
    return _exit_for(v)


def cmd_sample(args) -> int:
    """Random problem file, for seeding regression corpora."""
    rng = random.Random(args.seed)
    ctx = fq_context(args.p, args.e)
    fs = []
    for _ in range(args.r):
        terms = {}
        for _ in range(rng.randint(1, args.s)):
            e = [0] * args.n
            for _ in range(rng.randint(1, args.delta)):
                e[rng.randrange(args.n)] += 1
            c = ctx.random(rng)
            if c:
                terms[tuple(e)] = c
        fs.append(SparsePoly(ctx, args.n, terms) or SparsePoly.var(ctx, args.n, 0))
    sys.stdout.write(problem_from_polys(fs).to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wittjac", description="Algebraic independence over finite fields.")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized tooling")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("indep", help="decide independence of the polynomials in a problem file")
    s.add_argument("file")
    s.add_argument("--method", choices=METHODS + ("all",), default="wj")
    s.add_argument("--mode", choices=("exhaustive", "support-guided"), default="exhaustive")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_indep)

    s = sub.add_parser("wjp", help="print the Witt-Jacobian polynomial")
    s.add_argument("file")
    s.add_argument("--index-set", help="comma-separated, 1-based")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--precision", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_wjp)

    s = sub.add_parser("degeneracy", help="test the first polynomial for degeneracy")
    s.add_argument("file")
    s.add_argument("--level", type=int)
    s.add_argument("--mode", choices=("bounded", "unbounded"), default="bounded")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_degeneracy)

    s = sub.add_parser("hitting-set", help="stream hitting-set points as JSON lines")
    for flag in ("--n", "--r", "--s", "--delta", "--d"):
        s.add_argument(flag, type=int, required=True)
    s.add_argument("--override-s1", type=int)
    s.add_argument("--override-s2", type=int)
    s.add_argument("--override-N", dest="override_N", type=int)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--t", type=int)
    s.add_argument("--limit", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_hitting_set)

    s = sub.add_parser("coeff", help="coefficient of x^alpha in a circuit by interpolation")
    s.add_argument("--circuit", required=True)
    s.add_argument("--alpha", required=True, help="comma-separated exponents")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--e", type=int, default=1)
    s.add_argument("--precision", type=int, default=1)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_coeff)

    s = sub.add_parser("witt-demo", help="addition and multiplication tables of W_len(F_{p^t})")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--t", type=int, default=1)
    s.add_argument("--len", type=int, default=2)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_witt_demo)

    s = sub.add_parser("algo5", help="interpolation-based test on circuit inputs")
    s.add_argument("--circuits", required=True, help="problem file with circuit or polynomial entries")
    s.add_argument("--mode", choices=("exhaustive", "support-guided"), default="exhaustive")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_algo5)

    s = sub.add_parser("sample", help="print a random problem file")
    for flag, default in (("--p", 2), ("--e", 1), ("--n", 2), ("--r", 2), ("--s", 2), ("--delta", 2)):
        s.add_argument(flag, type=int, default=default)
    s.set_defaults(func=cmd_sample)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, PolyError, CircuitError, RingError, WittError, HittingError, PrecisionError,
            InterpError, TermCapExceeded, OracleCapExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
