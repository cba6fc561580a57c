"""RReliefF feature weights for regression targets.

For each selected instance ``R`` and each of its ``k`` nearest neighbours
``I`` (Euclidean distance on range-normalised features) with neighbour
weight ``d``, the algorithm accumulates

    N_dC       += d * diff(target, R, I)
    N_dA[j]    += d * diff(j, R, I)
    N_dCdA[j]  += d * diff(target, R, I) * diff(j, R, I)

and reports ``W[j] = N_dCdA[j] / N_dC - (N_dA[j] - N_dCdA[j]) / (m - N_dC)``
where ``m`` is the number of instances (the neighbour weights of one
instance sum to one). ``diff`` is the absolute difference after scaling by
the observed range.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..dataset import RegressionDataset
from ..errors import ParameterError
from ..seeding import make_rng
from . import _kernels
from .scores import ImportanceScores

__all__ = ["RelieffConfig", "NeighborTerms", "neighbor_terms", "rrelieff", "range_normalize"]

WEIGHTINGS = ("uniform", "rank")


@dataclass(frozen=True)
class RelieffConfig:
    """RReliefF settings.

    ``n_iterations=None`` visits every instance. ``weighting="rank"`` gives
    the ``r``-th neighbour weight ``exp(-(r / sigma)**2)`` (renormalised)
    instead of the uniform ``1 / k``.
    """

    k_neighbors: int = 10
    n_iterations: int | None = None
    weighting: str = "uniform"
    sigma: float = 50.0
    seed: int = 0

    name = "relieff"

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ParameterError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.n_iterations is not None and self.n_iterations < 1:
            raise ParameterError("n_iterations must be >= 1 or None")
        if self.weighting not in WEIGHTINGS:
            raise ParameterError(f"weighting must be one of {WEIGHTINGS}")
        if not self.sigma > 0:
            raise ParameterError("sigma must be positive")

    def neighbor_weights(self) -> np.ndarray:
        k = self.k_neighbors
        if self.weighting == "uniform":
            return np.full(k, 1.0 / k)
        raw = np.exp(-((np.arange(1, k + 1) / self.sigma) ** 2))
        return raw / raw.sum()

    def to_dict(self) -> dict:
        return {"engine": self.name, **asdict(self)}


@dataclass(frozen=True)
class NeighborTerms:
    """Target-independent part of an RReliefF run on one feature matrix."""

    instances: np.ndarray
    neighbors: np.ndarray
    weights: np.ndarray
    feature_diff: np.ndarray  # (m, k, p)
    weighted_feature_diff: np.ndarray  # N_dA

    @property
    def m(self) -> int:
        return self.instances.shape[0]


def range_normalize(a: np.ndarray) -> np.ndarray:
    """Scale columns (or a vector) to ``[0, 1]``; constant columns become 0."""
    a = np.asarray(a, dtype=float)
    lo = a.min(axis=0)
    span = a.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    out = (a - lo) / safe
    return np.where(span > 0, out, 0.0)


def _check_size(n: int, cfg: RelieffConfig):
    if n <= cfg.k_neighbors:
        raise ParameterError(
            f"RReliefF with k={cfg.k_neighbors} needs more than {cfg.k_neighbors} examples, got {n}"
        )


def select_instances(n: int, cfg: RelieffConfig, target_node: int) -> np.ndarray:
    if cfg.n_iterations is None or cfg.n_iterations >= n:
        return np.arange(n)
    rng = make_rng(cfg.seed, "relieff", int(target_node))
    return np.sort(rng.choice(n, size=cfg.n_iterations, replace=False))


def neighbor_terms(features: np.ndarray, cfg: RelieffConfig, instances=None) -> NeighborTerms:
    X = np.asarray(features, dtype=float)
    n = X.shape[0]
    _check_size(n, cfg)
    instances = np.arange(n) if instances is None else np.asarray(instances, dtype=np.int64)
    Z = np.ascontiguousarray(range_normalize(X))
    nbrs = np.empty((instances.shape[0], cfg.k_neighbors), dtype=np.int64)
    _kernels.knn(Z, instances, cfg.k_neighbors, nbrs)
    w = cfg.neighbor_weights()
    dA = np.abs(Z[instances][:, None, :] - Z[nbrs])
    nda = np.einsum("k,rkp->p", w, dA)
    return NeighborTerms(instances, nbrs, w, dA, nda)


def rrelieff(ds: RegressionDataset, cfg: RelieffConfig, terms: NeighborTerms | None = None) -> ImportanceScores:
    """RReliefF weights of every feature of *ds*.

    Higher is more relevant; weights can be negative. A target with no
    variation among neighbour pairs yields all-zero weights. *terms* lets
    callers share the neighbour search between datasets that have the same
    feature matrix and instance selection.
    """
    n, p = ds.features.shape
    _check_size(n, cfg)
    if terms is None:
        terms = neighbor_terms(ds.features, cfg, select_instances(n, cfg, ds.target_node))
    yn = range_normalize(ds.targets)
    inst, nbrs = terms.instances, terms.neighbors
    wdc = np.abs(yn[inst][:, None] - yn[nbrs]) * terms.weights
    ndc = wdc.sum()
    if ndc == 0:
        return ImportanceScores(ds.target_node, np.zeros(p))
    ndcda = np.einsum("rk,rkp->p", wdc, terms.feature_diff)
    rest = terms.m - ndc
    scores = ndcda / ndc
    if rest > 0:
        scores = scores - (terms.weighted_feature_diff - ndcda) / rest
    return ImportanceScores(ds.target_node, scores)
