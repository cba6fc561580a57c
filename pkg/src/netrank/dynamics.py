"""Random directed networks and coupled discrete-map dynamics on them.

Network convention: ``adj.a[i, j]`` is true when node ``j`` drives node
``i``. The coupled update for node ``i`` is

    x_i(t+1) = (1 - eps) f(x_i(t)) + eps * sum_j a[i, j] / d_i * f(x_j(t))

with ``d_i`` the in-degree of ``i``. A node with no inputs evolves as the
bare map.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ParameterError, UndefinedCorrelationError
from .seeding import make_rng

__all__ = [
    "AdjacencyMatrix",
    "TrajectoryPanel",
    "Logistic",
    "Ikeda",
    "MapKind",
    "generate_er_network",
    "map_step",
    "coupling_matrix",
    "simulate",
    "add_observation_noise",
    "mean_pairwise_correlation",
]


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Boolean directed graph, ``a[i, j]`` meaning ``j -> i``."""

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"adjacency must be square, got shape {a.shape}")
        if a.shape[0] < 2:
            raise ParameterError("adjacency needs at least 2 nodes")
        if a.diagonal().any():
            raise ParameterError("self-loops are not allowed")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def n_links(self) -> int:
        return int(self.a.sum())

    def in_degree(self) -> np.ndarray:
        return self.a.sum(axis=1)

    def edges(self) -> list[tuple[int, int]]:
        """``(src, dst)`` pairs, ordered by destination then source."""
        dst, src = np.nonzero(self.a)
        return [(int(s), int(d)) for d, s in zip(dst, src)]

    @classmethod
    def from_edges(cls, n: int, edges) -> "AdjacencyMatrix":
        a = np.zeros((n, n), dtype=bool)
        for src, dst in edges:
            a[dst, src] = True
        return cls(a)

    def permuted(self, perm) -> "AdjacencyMatrix":
        """Relabel nodes so that old node ``perm[k]`` becomes node ``k``."""
        perm = np.asarray(perm)
        return AdjacencyMatrix(self.a[np.ix_(perm, perm)])

    def __eq__(self, other):
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self.a.shape == other.a.shape and bool(np.array_equal(self.a, other.a))

    __hash__ = None


@dataclass(frozen=True)
class TrajectoryPanel:
    """Observed time series, ``x[i, t]`` is the state of node ``i`` at step ``t``."""

    x: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 2:
            raise ParameterError(f"panel must be 2-D (nodes x time), got {x.shape}")
        if not np.isfinite(x).all():
            raise ParameterError("panel contains NaN or infinite values")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def l(self) -> int:
        return self.x.shape[1]

    def permuted(self, perm) -> "TrajectoryPanel":
        return TrajectoryPanel(self.x[np.asarray(perm)], dict(self.meta))

    def __eq__(self, other):
        if not isinstance(other, TrajectoryPanel):
            return NotImplemented
        return self.x.shape == other.x.shape and bool(np.array_equal(self.x, other.x))

    __hash__ = None


@dataclass(frozen=True)
class Logistic:
    """Logistic map ``x -> r x (1 - x)``; fully chaotic at ``r = 4``."""

    r: float = 4.0
    name = "logistic"

    def __post_init__(self):
        if not self.r > 0:
            raise ParameterError(f"logistic r must be positive, got {self.r}")

    def step(self, x):
        return self.r * x * (1.0 - x)

    def initial_state(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(0.0, 1.0, size=n)

    def observe(self, state):
        return state

    @property
    def bounded_unit(self) -> bool:
        # [0, 1] is invariant for r <= 4 and closed under convex combination
        return self.r <= 4.0

    def params(self) -> dict:
        return {"kind": self.name, "r": self.r}


@dataclass(frozen=True)
class Ikeda:
    """Ikeda map on the complex plane, ``z -> 1 + u z exp(i t)``.

    ``t = 0.4 - 6 / (1 + |z|^2)``. Written out in components this is the
    usual pair ``x' = 1 + u (x cos t - y sin t)``, ``y' = u (x sin t + y cos t)``.
    Only the real part is observable.
    """

    u: float = 0.9
    name = "ikeda"

    def __post_init__(self):
        if not self.u > 0:
            raise ParameterError(f"ikeda u must be positive, got {self.u}")

    def step(self, z):
        z = np.asarray(z, dtype=complex)
        t = 0.4 - 6.0 / (1.0 + z.real**2 + z.imag**2)
        out = 1.0 + self.u * z * np.exp(1j * t)
        return out[()] if out.ndim == 0 else out

    def initial_state(self, rng: np.random.Generator, n: int) -> np.ndarray:
        xy = rng.uniform(0.0, 1.0, size=(2, n))
        return xy[0] + 1j * xy[1]

    def observe(self, state):
        return np.real(state)

    bounded_unit = False

    def params(self) -> dict:
        return {"kind": self.name, "u": self.u}


MapKind = Union[Logistic, Ikeda]


def map_from_params(params: dict) -> MapKind:
    kind = params.get("kind", "logistic")
    if kind == "logistic":
        return Logistic(float(params.get("r", 4.0)))
    if kind == "ikeda":
        return Ikeda(float(params.get("u", 0.9)))
    raise ParameterError(f"unknown map kind {kind!r}")


def generate_er_network(n: int, rho: float = 0.1, seed: int = 0) -> AdjacencyMatrix:
    """Directed Erdos-Renyi graph: each ordered pair ``j -> i`` (``i != j``)
    is present independently with probability *rho*."""
    if int(n) != n or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n}")
    if not 0.0 < rho < 1.0:
        raise ParameterError(f"rho must lie in (0, 1), got {rho}")
    n = int(n)
    rng = make_rng(seed, "graph")
    a = rng.random((n, n)) < rho
    np.fill_diagonal(a, False)
    return AdjacencyMatrix(a)


def map_step(state, kind: MapKind):
    """Apply the bare (uncoupled) map once."""
    return kind.step(state)


def coupling_matrix(adj: AdjacencyMatrix) -> np.ndarray:
    """Row-normalised input weights ``a[i, j] / d_i``.

    Rows of nodes without inputs carry a 1 on the diagonal, so the coupling
    term falls back to the node's own image.
    """
    a = adj.a.astype(float)
    deg = a.sum(axis=1)
    w = np.zeros_like(a)
    has_in = deg > 0
    w[has_in] = a[has_in] / deg[has_in, None]
    idle = np.flatnonzero(~has_in)
    w[idle, idle] = 1.0
    return w


def simulate(
    adj: AdjacencyMatrix,
    kind: MapKind,
    eps: float,
    l: int,
    transient: int = 0,
    seed: int = 0,
    initial=None,
) -> TrajectoryPanel:
    """Iterate the coupled map network and record *l* observed steps.

    Parameters
    ----------
    adj : AdjacencyMatrix
        Directed network, ``adj.a[i, j]`` meaning ``j -> i``.
    kind : Logistic or Ikeda
        Local map. For Ikeda the complex state is coupled as a whole and the
        returned panel holds its real part only.
    eps : float
        Coupling strength in ``[0, 1]``.
    l : int
        Number of recorded steps; the first recorded step is the state after
        *transient* discarded iterations.
    transient : int
        Iterations dropped before recording.
    seed : int
        Seed of the initial-condition stream (uniform on ``[0, 1]``).
    initial : array, optional
        Explicit initial state, overriding the seeded draw.
    """
    if not 0.0 <= eps <= 1.0:
        raise ParameterError(f"eps must lie in [0, 1], got {eps}")
    if int(l) != l or l < 2:
        raise ParameterError(f"l must be an integer >= 2, got {l}")
    if int(transient) != transient or transient < 0:
        raise ParameterError(f"transient must be a non-negative integer, got {transient}")
    l, transient = int(l), int(transient)
    n = adj.n

    if initial is None:
        state = kind.initial_state(make_rng(seed, "init"), n)
    else:
        state = np.array(initial, dtype=complex if isinstance(kind, Ikeda) else float)
        if state.shape != (n,):
            raise ParameterError(f"initial state must have shape ({n},)")

    w = coupling_matrix(adj)
    clip = kind.bounded_unit
    keep = 1.0 - eps
    out = np.empty((n, l))

    def advance(s):
        img = kind.step(s)
        nxt = keep * img + eps * (w @ img)
        if clip:
            # rounding in the weighted sum can leave [0, 1] by an ulp, and the
            # logistic map diverges from there
            np.clip(nxt, 0.0, 1.0, out=nxt)
        return nxt

    for _ in range(transient):
        state = advance(state)
    for t in range(l):
        out[:, t] = kind.observe(state)
        if t + 1 < l:
            state = advance(state)

    meta = {
        "map": kind.params(),
        "eps": float(eps),
        "transient": transient,
        "seed": int(seed) if initial is None else None,
    }
    return TrajectoryPanel(out, meta)


def add_observation_noise(panel: TrajectoryPanel, sigma: float, seed: int = 0) -> TrajectoryPanel:
    """Add i.i.d. zero-mean Gaussian noise of standard deviation *sigma*.

    The dynamics are not affected: noise is layered on the recorded values.
    """
    if not sigma >= 0:
        raise ParameterError(f"sigma must be non-negative, got {sigma}")
    meta = dict(panel.meta, sigma=float(sigma), noise_seed=int(seed))
    if sigma == 0:
        return TrajectoryPanel(panel.x.copy(), meta)
    rng = make_rng(seed, "noise")
    return TrajectoryPanel(panel.x + rng.normal(0.0, sigma, size=panel.x.shape), meta)


def mean_pairwise_correlation(panel: TrajectoryPanel) -> float:
    """Mean of ``|pearson(x_i, x_j)|`` over unordered pairs ``i < j``.

    Pairs involving a constant trajectory are left out of the mean.
    """
    if panel.l < 3:
        raise ParameterError("need at least 3 time steps for a correlation")
    x = panel.x
    live = np.ptp(x, axis=1) > 0
    if live.sum() < 2:
        raise UndefinedCorrelationError("fewer than two non-constant trajectories")
    c = np.corrcoef(x[live])
    iu = np.triu_indices(c.shape[0], k=1)
    return float(np.clip(np.abs(c[iu]), 0.0, 1.0).mean())
