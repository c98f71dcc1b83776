"""Exact clique-width of small graphs through a SAT encoding of
derivations (sequences of component/group partitions)."""

from .derivation import (Derivation, Partition, Template, check_models, make_strict, shorten,
                         validate_derivation)
from .encoder import decode_model, emit_dimacs, encode
from .graph import Graph, parse_edge_list, parse_graph6, to_graph6
from .kexpr import derivation_to_expr, evaluate, expr_to_derivation, parse_expr, print_expr
from .oracle import oracle_cwd, oracle_min_derivation
from .search import (Certificate, SearchOptions, clique_width, decide_width_at_most,
                     verify_certificate)

__version__ = "0.1.0"

__all__ = [
    "Certificate", "Derivation", "Graph", "Partition", "SearchOptions", "Template",
    "check_models", "clique_width", "decide_width_at_most", "decode_model",
    "derivation_to_expr", "emit_dimacs", "encode", "evaluate", "expr_to_derivation",
    "make_strict", "oracle_cwd", "oracle_min_derivation", "parse_edge_list", "parse_expr",
    "parse_graph6", "print_expr", "shorten", "to_graph6", "validate_derivation",
    "verify_certificate",
]
