"""Multistage perfect matching on temporal graphs: exact oracles,
approximation algorithms with certified ratios, reductions and generators."""

from .core import (
    InfeasibleInstanceError,
    InstanceFormatError,
    MultistageMatching,
    TemporalGraph,
    Verdict,
    WeightedGraph,
    edge,
    parse_instance,
    parse_solution,
    profit,
    serialize_instance,
    serialize_solution,
    union_cost,
    verify,
)
from .exact import EnumerationOverflow, ExactResult, enumerate_perfect_matchings, exact_maxcut, exact_solve
from .matching import allowed_edges, has_perfect_matching, max_weight_perfect_matching, reduce

__version__ = "0.1.0"

__all__ = [
    "allowed_edges",
    "edge",
    "enumerate_perfect_matchings",
    "EnumerationOverflow",
    "exact_maxcut",
    "exact_solve",
    "ExactResult",
    "has_perfect_matching",
    "InfeasibleInstanceError",
    "InstanceFormatError",
    "max_weight_perfect_matching",
    "MultistageMatching",
    "parse_instance",
    "parse_solution",
    "profit",
    "reduce",
    "serialize_instance",
    "serialize_solution",
    "TemporalGraph",
    "union_cost",
    "Verdict",
    "verify",
    "WeightedGraph",
]
