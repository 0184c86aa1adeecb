"""lgopt: loading-schedule cost compiler and exact-LP exponent optimizer."""

from .graphs import CertGraph, UndirectedGraph, canonical_form, contract, is_subgraph_of, undirected_version
from .schedules import LoadingSchedule, enumerate_schedules, prefix_sets, validate
from .costs import (
    ExponentAssignment,
    StageCost,
    check_admissible,
    classify_regime,
    edge_load_exponent,
    global_exponent,
    setup_exponent,
    total_exponent,
    vertex_load_exponent,
)
from .lp import LinearProgram, LpOutcome, solve_lp

__all__ = [
    "CertGraph",
    "UndirectedGraph",
    "canonical_form",
    "contract",
    "is_subgraph_of",
    "undirected_version",
    "LoadingSchedule",
    "enumerate_schedules",
    "prefix_sets",
    "validate",
    "ExponentAssignment",
    "StageCost",
    "check_admissible",
    "classify_regime",
    "edge_load_exponent",
    "global_exponent",
    "setup_exponent",
    "total_exponent",
    "vertex_load_exponent",
    "LinearProgram",
    "LpOutcome",
    "solve_lp",
]
