"""Top-k maximal s-biplex search in bipartite graphs."""

from .bigraph import (BipartiteGraph, anti_neighbors, generate_er, induced_subgraph,
                      is_maximal_s_biplex, is_s_biplex, k_hop, parse_edge_list,
                      read_edge_list, write_edge_list)
from .bounds import SideBounds, initial_bounds, update_bounds
from .driver import FastStats, ProgressiveSchedule, branching_factor, fast_mvbp
from .errors import (BiplexError, ContractError, EmptyGraphError, GraphParseError,
                     InfeasibleError, ParameterError, SearchTimeout)
from .oracle import enumerate_all_maximal, oracle_top_k
from .order import DegeneracyOrdering, compute_degeneracy_ordering
from .search import SearchConfig, SearchStats, mvbp
from .state import SearchParams, Solution, SolutionPool

__all__ = [
    "BipartiteGraph", "anti_neighbors", "generate_er", "induced_subgraph",
    "is_maximal_s_biplex", "is_s_biplex", "k_hop", "parse_edge_list", "read_edge_list",
    "write_edge_list", "SideBounds", "initial_bounds", "update_bounds", "FastStats",
    "ProgressiveSchedule", "branching_factor", "fast_mvbp", "BiplexError", "ContractError",
    "EmptyGraphError", "GraphParseError", "InfeasibleError", "ParameterError",
    "SearchTimeout", "enumerate_all_maximal", "oracle_top_k", "DegeneracyOrdering",
    "compute_degeneracy_ordering", "SearchConfig", "SearchStats", "mvbp", "SearchParams",
    "Solution", "SolutionPool",
]
