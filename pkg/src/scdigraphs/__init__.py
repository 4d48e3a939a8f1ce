"""Exact counts, asymptotic evaluators and uniform samplers for digraphs with
positive in/out-degrees, and for the strongly connected ones among them."""

from .errors import GuardError, RegimeError, RejectionBudgetExceeded
from .graph_core import DegreeSequencePair, Digraph, MultiDigraph, is_strongly_connected

__all__ = [
    "DegreeSequencePair",
    "Digraph",
    "GuardError",
    "MultiDigraph",
    "RegimeError",
    "RejectionBudgetExceeded",
    "is_strongly_connected",
]
__version__ = "0.1.0"
