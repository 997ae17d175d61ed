"""Causal semantics of place/transition nets: firing, processes, swapping
classes, trace classes, conflict and maximality analysis."""

from .multiset import Multiset
from .net import Bounds, Net, NetError, ParseError, Verdict, explore, fire_sequence, load_net, parse_net
from .process import GRProcess, proc
from .swapping import BDClass, bd_canonical, bd_leq, bd_of, swap
from .traces import adjacent, trace_class, trace_leq
from .conflict import check_conflict_freeness, check_structural
from .maximality import corollary_check, enumerate_maximal

__version__ = "0.1.0"

__all__ = [
    "BDClass", "Bounds", "GRProcess", "Multiset", "Net", "NetError", "ParseError", "Verdict",
    "adjacent", "bd_canonical", "bd_leq", "bd_of", "check_conflict_freeness",
    "check_structural", "corollary_check", "enumerate_maximal", "explore", "fire_sequence",
    "load_net", "parse_net", "proc", "swap", "trace_class", "trace_leq",
]
