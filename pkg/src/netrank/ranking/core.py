"""Assemble the importance matrix for a whole panel."""
from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..dataset import build_node_dataset, lagged_features
from ..dynamics import TrajectoryPanel
from ..errors import ParameterError
from .forest import ForestConfig, presort_order, random_forest_importance
from .relieff import RelieffConfig, neighbor_terms, rrelieff, select_instances
from .scores import ImportanceMatrix

__all__ = ["rank_all_nodes", "panel_digest"]


def panel_digest(panel: TrajectoryPanel) -> str:
    return hashlib.sha256(np.ascontiguousarray(panel.x).tobytes()).hexdigest()[:16]


def rank_all_nodes(panel: TrajectoryPanel, engine, workers: int = 1) -> ImportanceMatrix:
    """Rank every node as a predictor of every other node's next state.

    Row ``i`` of the result comes from node ``i``'s regression dataset
    alone. Work that depends only on the shared feature matrix (presorting
    for the forest, the neighbour search for RReliefF) is done once.
    Per-node random streams are keyed on the node index, so *workers* has
    no influence on the result.
    """
    features = lagged_features(panel)
    n = panel.n

    if isinstance(engine, ForestConfig):
        engine.resolve_mtry(n)
        presorted = presort_order(features)

        def one(i):
            ds = build_node_dataset(panel, i, features)
            return random_forest_importance(ds, engine, presorted).scores

    elif isinstance(engine, RelieffConfig):
        m = features.shape[0]
        shared = None
        if engine.n_iterations is None or engine.n_iterations >= m:
            shared = neighbor_terms(features, engine, select_instances(m, engine, 0))

        def one(i):
            ds = build_node_dataset(panel, i, features)
            return rrelieff(ds, engine, shared).scores

    else:
        raise ParameterError(f"unsupported ranking engine {engine!r}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(n)))
    else:
        rows = [one(i) for i in range(n)]

    meta = {
        **engine.to_dict(),
        "n": n,
        "l": panel.l,
        "panel_sha256": panel_digest(panel),
    }
    return ImportanceMatrix(np.vstack(rows), meta)
