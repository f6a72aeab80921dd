"""Algebraic independence over finite fields via Witt-Jacobian polynomials."""

from .circuit import Circuit, CircuitBuilder, circuit_from_poly, parse_circuit, to_sparse_poly
from .hitting import HittingParams, hitting_set, hits, variable_reduction_search
from .interp import algo5_independence, interp_coeff
from .oracle import independence_oracle
from .poly import SparsePoly, parse_poly
from .problem import load_problem, parse_problem
from .rings import ZZ, QuotientRing, fq_context, fq_embed, gr_context
from .witt import WittVec, witt_to_galois
from .wjcore import (IndependenceVerdict, Refusal, classical_jacobian_independent, is_degenerate,
                     padic_jacobian_necessity, witt_jacobian_independent, wjp)

__all__ = [
    "Circuit", "CircuitBuilder", "circuit_from_poly", "parse_circuit", "to_sparse_poly",
    "HittingParams", "hitting_set", "hits", "variable_reduction_search",
    "algo5_independence", "interp_coeff", "independence_oracle",
    "SparsePoly", "parse_poly", "load_problem", "parse_problem",
    "ZZ", "QuotientRing", "fq_context", "fq_embed", "gr_context",
    "WittVec", "witt_to_galois",
    "IndependenceVerdict", "Refusal", "classical_jacobian_independent", "is_degenerate",
    "padic_jacobian_necessity", "witt_jacobian_independent", "wjp",
]
