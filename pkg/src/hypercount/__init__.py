"""Exact and asymptotic counting of k-uniform hypergraphs by degree sequence."""
from .core import (
    BudgetExceeded,
    DegreeSequence,
    EdgeSet,
    HypercountError,
    LogValue,
    ParameterError,
    Params,
    degree_stats,
    lambda_k_distance,
    sigma_sq,
)
from .exact import (
    ExactCounter,
    count_exact,
    count_naive,
    count_with_edges,
    edge_probability_exact,
    path_probability_exact,
    ratio_exact,
)

__version__ = "0.1.0"
