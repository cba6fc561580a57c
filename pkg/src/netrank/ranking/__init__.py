"""Feature-ranking engines and the importance-matrix driver."""
from .core import panel_digest, rank_all_nodes
from .forest import ForestConfig, random_forest_importance
from .relieff import NeighborTerms, RelieffConfig, neighbor_terms, rrelieff
from .scores import ImportanceMatrix, ImportanceScores
from .tree import RegressionTree, fit_regression_tree

__all__ = [
    "ForestConfig",
    "RelieffConfig",
    "ImportanceScores",
    "ImportanceMatrix",
    "NeighborTerms",
    "RegressionTree",
    "fit_regression_tree",
    "random_forest_importance",
    "rrelieff",
    "neighbor_terms",
    "rank_all_nodes",
    "panel_digest",
]
