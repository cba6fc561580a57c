"""Random Forest feature importance for one regression problem."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..dataset import RegressionDataset
from ..errors import ConfigurationError, ParameterError
from ..seeding import spawn_seeds
from . import _kernels
from .scores import ImportanceScores

__all__ = ["ForestConfig", "random_forest_importance", "presort_order"]

IMPORTANCE_MODES = ("impurity", "permutation")

# split-search cost model, see _kernels.grow_tree; the fastest setting on
# single-core timings at L=200..12800 and N=12..50
ROOT_PRESORT_RATIO = 0.7
PRESORT_RATIO = 2.0
SCAN_RATIO = 2.0


@dataclass(frozen=True)
class ForestConfig:
    """Random Forest settings.

    ``mtry=None`` means ``ceil(sqrt(n_features))``. Impurity importance is
    the SSE reduction credited to each feature, averaged over trees and
    normalised to sum to one. Permutation importance is the mean increase
    of out-of-bag MSE when the feature is shuffled, floored at zero.
    """

    n_trees: int = 1000
    mtry: int | None = None
    min_samples_split: int = 2
    bootstrap: bool = True
    importance_mode: str = "impurity"
    seed: int = 0

    name = "forest"

    def __post_init__(self):
        if self.n_trees < 1:
            raise ParameterError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.mtry is not None and self.mtry < 1:
            raise ParameterError(f"mtry must be >= 1, got {self.mtry}")
        if self.min_samples_split < 1:
            raise ParameterError("min_samples_split must be >= 1")
        if self.importance_mode not in IMPORTANCE_MODES:
            raise ParameterError(f"importance_mode must be one of {IMPORTANCE_MODES}")
        if self.importance_mode == "permutation" and not self.bootstrap:
            raise ConfigurationError("permutation importance needs bootstrap (out-of-bag rows)")

    def resolve_mtry(self, n_features: int) -> int:
        mtry = math.ceil(math.sqrt(n_features)) if self.mtry is None else self.mtry
        if mtry > n_features:
            raise ParameterError(f"mtry={mtry} exceeds the {n_features} available features")
        return mtry

    def to_dict(self) -> dict:
        return {"engine": self.name, **asdict(self)}


def presort_order(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Transposed features and their per-feature argsort, reusable across
    targets that share the same feature matrix."""
    XT = np.ascontiguousarray(np.asarray(features, dtype=float).T)
    return XT, np.argsort(XT, axis=1, kind="stable").astype(np.int32)


def random_forest_importance(ds: RegressionDataset, cfg: ForestConfig, presorted=None) -> ImportanceScores:
    """Train ``cfg.n_trees`` trees on bootstrap resamples of *ds* and score
    each feature.

    Tree ``t`` of target ``i`` draws from its own stream keyed on
    ``(cfg.seed, i, t)``, so a forest's first trees do not depend on how
    many trees follow. *presorted* is an optional ``presort_order`` result
    for ``ds.features``.
    """
    n, p = ds.features.shape
    if n < 1:
        raise ParameterError("dataset has no examples")
    mtry = cfg.resolve_mtry(p)
    XT, order = presort_order(ds.features) if presorted is None else presorted
    y = np.ascontiguousarray(ds.targets, dtype=float)
    seeds = spawn_seeds(cfg.seed, cfg.n_trees, "forest", ds.target_node)
    permutation = cfg.importance_mode == "permutation"

    impurity = np.zeros((cfg.n_trees, p))
    perm = np.zeros((cfg.n_trees, p) if permutation else (1, p))
    valid = np.zeros(cfg.n_trees if permutation else 1, dtype=bool)
    _kernels.fit_forest(XT, y, order, seeds, mtry, float(cfg.min_samples_split),
                        cfg.bootstrap, permutation, ROOT_PRESORT_RATIO, PRESORT_RATIO, SCAN_RATIO,
                        impurity, perm, valid)

    if permutation:
        if not valid.any():
            raise ConfigurationError("no tree had out-of-bag rows; dataset too small")
        scores = np.maximum(perm[valid].mean(axis=0), 0.0)
    else:
        total = impurity.sum(axis=0) / cfg.n_trees
        mass = total.sum()
        # a constant target admits no split; fall back to chance-level scores
        scores = total / mass if mass > 0 else np.full(p, 1.0 / p)
    return ImportanceScores(ds.target_node, scores)
