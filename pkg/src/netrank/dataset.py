"""Per-node one-step-ahead regression problems built from a panel."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import TrajectoryPanel
from .errors import ParameterError

__all__ = ["RegressionDataset", "build_node_dataset", "lagged_features"]


@dataclass(frozen=True)
class RegressionDataset:
    """Supervised problem for one node.

    ``features[t]`` is the network state at step ``t`` (every node, the
    target node included) and ``targets[t]`` is the target node's state at
    step ``t + 1``.
    """

    target_node: int
    features: np.ndarray
    targets: np.ndarray

    @property
    def n_examples(self) -> int:
        return self.targets.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def lagged_features(panel: TrajectoryPanel) -> np.ndarray:
    """The ``(L-1) x N`` feature matrix shared by every node's dataset."""
    if panel.l < 2:
        raise ParameterError("need at least 2 time steps to form a dataset")
    return np.ascontiguousarray(panel.x[:, :-1].T)


def build_node_dataset(panel: TrajectoryPanel, i: int, features: np.ndarray | None = None) -> RegressionDataset:
    """Dataset for predicting node *i* one step ahead.

    *features* may be passed in to reuse :func:`lagged_features` across
    nodes; it is not copied.
    """
    if not 0 <= i < panel.n:
        raise ParameterError(f"node index {i} out of range for {panel.n} nodes")
    if features is None:
        features = lagged_features(panel)
    targets = panel.x[i, 1:].copy()
    return RegressionDataset(int(i), features, targets)
