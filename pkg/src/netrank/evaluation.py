"""Scoring reconstructions against a known network.

Self-loops are never links of the network, so every count and curve here
is taken over the ``N (N - 1)`` off-diagonal positions only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .dynamics import AdjacencyMatrix, TrajectoryPanel
from .errors import EvaluationError, ParameterError
from .ranking.scores import ImportanceMatrix

__all__ = [
    "ConfusionCounts",
    "RocResult",
    "threshold_adjacency",
    "confusion",
    "tpr_fpr",
    "roc_auc",
    "mann_whitney_auc",
    "correlation_baseline",
]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class RocResult:
    """ROC curve swept over every distinct off-diagonal score.

    ``thresholds[k]`` produced the point ``(fpr[k], tpr[k])`` under the
    rule "link iff score > threshold"; the final threshold is ``-inf``.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float
    mann_whitney_auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def _matrix(f) -> np.ndarray:
    if isinstance(f, ImportanceMatrix):
        return f.f
    f = np.asarray(f, dtype=float)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ParameterError(f"score matrix must be square, got {f.shape}")
    return f


def _adj(a) -> np.ndarray:
    return a.a if isinstance(a, AdjacencyMatrix) else np.asarray(a, dtype=bool)


def _off_diagonal(n: int) -> np.ndarray:
    return ~np.eye(n, dtype=bool)


def threshold_adjacency(f, theta: float) -> AdjacencyMatrix:
    """Links where the score strictly exceeds *theta*; no self-loops."""
    f = _matrix(f)
    a = f > theta
    np.fill_diagonal(a, False)
    return AdjacencyMatrix(a)


def confusion(a_true, a_pred) -> ConfusionCounts:
    t, p = _adj(a_true), _adj(a_pred)
    if t.shape != p.shape:
        raise ParameterError(f"size mismatch: {t.shape} vs {p.shape}")
    mask = _off_diagonal(t.shape[0])
    t, p = t[mask], p[mask]
    return ConfusionCounts(
        tp=int(np.sum(t & p)),
        fp=int(np.sum(~t & p)),
        fn=int(np.sum(t & ~p)),
        tn=int(np.sum(~t & ~p)),
    )


def tpr_fpr(c: ConfusionCounts) -> tuple[float, float]:
    """``(TP / (TP + FN), FP / (FP + TN))`` with ``0 / 0`` read as 0."""
    pos = c.tp + c.fn
    neg = c.fp + c.tn
    tpr = c.tp / pos if pos else 0.0
    fpr = c.fp / neg if neg else 0.0
    return tpr, fpr


def mann_whitney_auc(scores, labels) -> float:
    """Probability that a random link outscores a random non-link, ties
    counting one half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("need at least one link and one non-link")
    ranks = rankdata(scores, method="average")
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_auc(f, a_true) -> RocResult:
    """ROC curve and area of the score matrix *f* against *a_true*.

    Diagonal entries are ignored. Raises :class:`EvaluationError` when the
    truth has no links or no non-links off the diagonal.
    """
    f = _matrix(f)
    t = _adj(a_true)
    if t.shape != f.shape:
        raise ParameterError(f"size mismatch: {f.shape} vs {t.shape}")
    mask = _off_diagonal(f.shape[0])
    scores = f[mask]
    labels = t[mask]
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("ground truth has no links or no non-links off the diagonal")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    lab = labels[order]
    # last position of each run of equal scores, walking from the top
    last = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tps = np.cumsum(lab)[last]
    fps = (last + 1) - tps
    tpr = np.r_[0.0, tps / n_pos]
    fpr = np.r_[0.0, fps / n_neg]
    thresholds = np.r_[s[last], -np.inf]
    auc = float(np.trapezoid(tpr, fpr))
    return RocResult(fpr, tpr, thresholds, auc, mann_whitney_auc(scores, labels))


def correlation_baseline(panel: TrajectoryPanel) -> ImportanceMatrix:
    """Univariate relevance-network scores.

    ``f[i, j] = |pearson(x_i(t + 1), x_j(t))|``; pairs involving a constant
    series score 0.
    """
    if panel.l < 3:
        raise ParameterError("need at least 3 time steps for a lagged correlation")
    ahead = panel.x[:, 1:]
    behind = panel.x[:, :-1]

    def standardize(a):
        c = a - a.mean(axis=1, keepdims=True)
        norm = np.sqrt((c * c).sum(axis=1, keepdims=True))
        return np.divide(c, norm, out=np.zeros_like(c), where=norm > 0)

    r = standardize(ahead) @ standardize(behind).T
    return ImportanceMatrix(np.clip(np.abs(r), 0.0, 1.0), {"engine": "corr-baseline"})
