"""Single CART regression tree (variance-reduction splits)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..seeding import make_rng
from . import _kernels
from .forest import PRESORT_RATIO, SCAN_RATIO

__all__ = ["RegressionTree", "fit_regression_tree"]


@dataclass(frozen=True)
class RegressionTree:
    """Array-encoded binary tree.

    Node ``k`` is a leaf when ``feature[k] == -1``; otherwise rows with
    ``x[feature[k]] <= threshold[k]`` descend to ``left[k]`` and the rest to
    ``right[k]``. ``value[k]`` is the mean target of the training rows that
    reached node ``k``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    importance: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_splits(self) -> int:
        return int((self.feature >= 0).sum())

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(X.shape[0])
        for r in range(X.shape[0]):
            k = 0
            while self.feature[k] >= 0:
                k = self.left[k] if X[r, self.feature[k]] <= self.threshold[k] else self.right[k]
            out[r] = self.value[k]
        return out


def fit_regression_tree(
    features,
    targets,
    mtry: int | None = None,
    rng=None,
    min_samples_split: int = 2,
    sample_weight=None,
) -> RegressionTree:
    """Grow a fully-developed regression tree.

    Parameters
    ----------
    features : (n, p) array
    targets : (n,) array
    mtry : int, optional
        Non-constant features examined per split, defaults to all ``p``.
    rng : int or numpy Generator
        Drives the candidate-feature order.
    min_samples_split : int
        Nodes carrying less total weight than this become leaves.
    sample_weight : (n,) array of non-negative counts, optional
        Row multiplicities, e.g. from a bootstrap draw. Zero-weight rows are
        ignored.

    Returns
    -------
    RegressionTree
        ``importance[j]`` holds the total SSE reduction of splits on ``j``.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ParameterError("features must be (n, p) and targets (n,)")
    n, p = X.shape
    if n < 1:
        raise ParameterError("need at least one example")
    mtry = p if mtry is None else int(mtry)
    if not 1 <= mtry <= p:
        raise ParameterError(f"mtry must lie in [1, {p}], got {mtry}")
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    if w.shape != (n,) or (w < 0).any() or not (w > 0).any():
        raise ParameterError("sample_weight must be non-negative with some positive entry")

    seed = make_rng(0 if rng is None else rng).integers(0, 2**63, dtype=np.uint64)
    state = np.array([seed], dtype=np.uint64)
    XT = np.ascontiguousarray(X.T)
    order = np.argsort(XT, axis=1, kind="stable").astype(np.int32)
    S = _kernels.presorted_rows(order, w, p)
    cap = 2 * int((w > 0).sum()) + 1
    feature = np.empty(cap, dtype=np.int64)
    threshold = np.empty(cap)
    left = np.empty(cap, dtype=np.int64)
    right = np.empty(cap, dtype=np.int64)
    value = np.empty(cap)
    importance = np.zeros(p)
    k = _kernels.grow_tree(XT, y, w, S, order, mtry, float(min_samples_split), PRESORT_RATIO,
                           SCAN_RATIO, state, feature, threshold, left, right, value, importance)
    return RegressionTree(feature[:k].copy(), threshold[:k].copy(), left[:k].copy(),
                          right[:k].copy(), value[:k].copy(), importance)
