from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError

__all__ = ["ImportanceScores", "ImportanceMatrix"]


@dataclass(frozen=True)
class ImportanceScores:
    """Scores of every node as a predictor of ``target_node``.

    Only the ordering of the scores carries meaning.
    """

    target_node: int
    scores: np.ndarray


@dataclass(frozen=True)
class ImportanceMatrix:
    """Row ``i`` holds the scores computed from node ``i``'s dataset, so
    ``f[i, j]`` rates node ``j`` as a driver of node ``i``."""

    f: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        f = np.array(self.f, dtype=float)
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise ParameterError(f"importance matrix must be square, got {f.shape}")
        if not np.isfinite(f).all():
            raise ParameterError("importance matrix has non-finite entries")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)

    @property
    def n(self) -> int:
        return self.f.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ImportanceMatrix):
            return NotImplemented
        return self.f.shape == other.f.shape and bool(np.array_equal(self.f, other.f))

    __hash__ = None
