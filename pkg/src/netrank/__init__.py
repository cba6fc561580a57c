"""Reconstruct directed networks of coupled maps by ranking node time series
as features of each other's next state."""
from .dataset import RegressionDataset, build_node_dataset
from .dynamics import (
    AdjacencyMatrix,
    Ikeda,
    Logistic,
    TrajectoryPanel,
    add_observation_noise,
    generate_er_network,
    map_step,
    mean_pairwise_correlation,
    simulate,
)
from .errors import (
    ConfigurationError,
    EvaluationError,
    NetrankError,
    ParameterError,
    UndefinedCorrelationError,
)
from .evaluation import (
    ConfusionCounts,
    RocResult,
    confusion,
    correlation_baseline,
    roc_auc,
    threshold_adjacency,
    tpr_fpr,
)
from .ranking import (
    ForestConfig,
    ImportanceMatrix,
    ImportanceScores,
    RelieffConfig,
    fit_regression_tree,
    random_forest_importance,
    rank_all_nodes,
    rrelieff,
)

__version__ = "0.1.0"
