"""Parameter sweeps, aggregation and timing benchmarks.

Every run draws its seeds from a stable hash of the master seed and the
run's own coordinates, so grids can be reordered, split or executed on any
number of workers without changing an individual result.
"""
from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from .dynamics import (
    add_observation_noise,
    generate_er_network,
    map_from_params,
    mean_pairwise_correlation,
    simulate,
)
from .errors import NetrankError, ParameterError
from .evaluation import correlation_baseline, roc_auc
from .ranking import ForestConfig, RelieffConfig, rank_all_nodes
from .seeding import derive_seed

log = logging.getLogger(__name__)

__all__ = [
    "ENGINES",
    "ExperimentSpec",
    "load_config",
    "RunRecord",
    "run_experiment",
    "replay",
    "aggregate",
    "bench_scaling",
    "write_records",
    "read_records",
    "write_summary",
    "reproduction_profile",
]

ENGINES = ("forest", "relieff", "corr-baseline")


def load_config(path) -> dict:
    """Read a JSON or YAML mapping (chosen by file suffix)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        d = yaml.safe_load(text)
    else:
        d = json.loads(text)
    if not isinstance(d, dict):
        raise ParameterError(f"{path}: config must be a mapping")
    return d


def _tuple(v, cast):
    if isinstance(v, (list, tuple)):
        return tuple(cast(x) for x in v)
    return (cast(v),)


@dataclass(frozen=True)
class ExperimentSpec:
    """A grid of network/dynamics settings crossed with ranking engines."""

    map: dict = field(default_factory=lambda: {"kind": "logistic", "r": 4.0})
    n: tuple = (25,)
    eps: tuple = (0.5,)
    l: tuple = (12800,)
    sigma: tuple = (0.0,)
    rho: float = 0.1
    realizations: int = 4
    engines: tuple = ("forest", "relieff")
    transient: int = 0
    seed: int = 0
    n_trees: int = 1000
    importance_mode: str = "impurity"
    k_neighbors: int = 10
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "n", _tuple(self.n, int))
        object.__setattr__(self, "eps", _tuple(self.eps, float))
        object.__setattr__(self, "l", _tuple(self.l, int))
        object.__setattr__(self, "sigma", _tuple(self.sigma, float))
        object.__setattr__(self, "engines", _tuple(self.engines, str))
        object.__setattr__(self, "map", dict(self.map))
        for name in ("n", "eps", "l", "sigma", "engines"):
            if not getattr(self, name):
                raise ParameterError(f"grid '{name}' must not be empty")
        if self.realizations < 1:
            raise ParameterError("realizations must be >= 1")
        bad = set(self.engines) - set(ENGINES)
        if bad:
            raise ParameterError(f"unknown engines {sorted(bad)}; choose from {ENGINES}")
        map_from_params(self.map)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ParameterError(f"unknown experiment keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        return cls.from_dict(load_config(path))

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("n", "eps", "l", "sigma", "engines"):
            d[k] = list(d[k])
        return d

    @property
    def n_grid_points(self) -> int:
        return len(self.n) * len(self.eps) * len(self.l) * len(self.sigma)


@dataclass(frozen=True)
class RunRecord:
    """One (grid point, realization, engine) run with everything needed to
    repeat it."""

    map_kind: str
    map_param: float
    n: int
    eps: float
    l: int
    sigma: float
    rho: float
    transient: int
    realization: int
    engine: str
    n_trees: int
    importance_mode: str
    k_neighbors: int
    master_seed: int
    graph_seed: int
    init_seed: int
    noise_seed: int
    rank_seed: int
    n_links: int
    auc: float | None
    mean_corr: float | None
    error: str = ""
    wall_time_seconds: float = field(default=0.0, compare=False)

    @property
    def grid_key(self) -> tuple:
        return (self.map_kind, self.map_param, self.n, self.eps, self.l, self.sigma, self.engine)

    @property
    def sort_key(self) -> tuple:
        return (self.map_kind, self.map_param, self.n, self.eps, self.l, self.sigma,
                self.realization, ENGINES.index(self.engine))


# ---------------------------------------------------------------- seeding

def _map_param(map_params: dict) -> float:
    kind = map_params.get("kind", "logistic")
    return float(map_params.get("r", 4.0) if kind == "logistic" else map_params.get("u", 0.9))


def run_seeds(master, map_params, n, eps, l, sigma, rho, transient, realization, engine) -> dict:
    """Child seeds of one run.

    The network depends on ``(n, rho, realization)`` only and the clean
    trajectories additionally on the map, ``eps``, ``l`` and the transient,
    so noise levels and engines are compared on the same underlying data.
    """
    mk, mp = map_params.get("kind", "logistic"), _map_param(map_params)
    return {
        "graph_seed": derive_seed(master, "graph", n, rho, realization),
        "init_seed": derive_seed(master, "init", mk, mp, n, rho, eps, l, transient, realization),
        "noise_seed": derive_seed(master, "noise", mk, mp, n, rho, eps, l, transient, sigma, realization),
        "rank_seed": derive_seed(master, "rank", mk, mp, n, rho, eps, l, transient, sigma, realization, engine),
    }


# ---------------------------------------------------------------- execution

def _engine(name: str, rank_seed: int, n_trees: int, importance_mode: str, k_neighbors: int):
    if name == "forest":
        return ForestConfig(n_trees=n_trees, importance_mode=importance_mode, seed=rank_seed)
    if name == "relieff":
        return RelieffConfig(k_neighbors=k_neighbors, seed=rank_seed)
    return None


def _score(panel, engine_name, engine_cfg):
    if engine_name == "corr-baseline":
        return correlation_baseline(panel)
    return rank_all_nodes(panel, engine_cfg)


def _run_job(job) -> list[RunRecord]:
    """Simulate one (n, eps, l, realization) panel and run every sigma and
    engine on it."""
    spec_d, n, eps, l, realization = job
    spec = ExperimentSpec.from_dict(spec_d)
    kind = map_from_params(spec.map)
    base = dict(
        map_kind=kind.name, map_param=_map_param(spec.map), n=n, eps=eps, l=l,
        rho=spec.rho, transient=spec.transient, realization=realization,
        n_trees=spec.n_trees, importance_mode=spec.importance_mode,
        k_neighbors=spec.k_neighbors, master_seed=spec.seed,
    )
    seeds0 = run_seeds(spec.seed, spec.map, n, eps, l, 0.0, spec.rho, spec.transient, realization, "")
    adj = generate_er_network(n, spec.rho, seeds0["graph_seed"])
    clean = simulate(adj, kind, eps, l, spec.transient, seeds0["init_seed"])

    out = []
    for sigma in spec.sigma:
        panel = None
        corr = None
        for engine_name in spec.engines:
            seeds = run_seeds(spec.seed, spec.map, n, eps, l, sigma, spec.rho, spec.transient,
                              realization, engine_name)
            t0 = time.perf_counter()
            auc, err = None, ""
            try:
                if panel is None:
                    panel = add_observation_noise(clean, sigma, seeds["noise_seed"])
                    try:
                        corr = mean_pairwise_correlation(panel)
                    except NetrankError:
                        corr = None
                cfg = _engine(engine_name, seeds["rank_seed"], spec.n_trees,
                              spec.importance_mode, spec.k_neighbors)
                auc = roc_auc(_score(panel, engine_name, cfg), adj).auc
            except NetrankError as exc:
                err = f"{type(exc).__name__}: {exc}"
                log.warning("run n=%s eps=%s l=%s sigma=%s r=%s %s failed: %s",
                            n, eps, l, sigma, realization, engine_name, err)
            out.append(RunRecord(
                **base, sigma=sigma, engine=engine_name, **seeds, n_links=adj.n_links,
                auc=auc, mean_corr=corr, error=err,
                wall_time_seconds=time.perf_counter() - t0,
            ))
    return out


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> list[RunRecord]:
    """Run every grid point x realization x engine; records come back in
    canonical order whatever the worker count."""
    workers = spec.workers if workers is None else workers
    spec_d = spec.to_dict()
    jobs = [(spec_d, n, eps, l, r)
            for n, eps, l, r in itertools.product(spec.n, spec.eps, spec.l, range(spec.realizations))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_job, jobs))
    else:
        chunks = [_run_job(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    return sorted(records, key=lambda r: r.sort_key)


def replay(record: RunRecord) -> RunRecord:
    """Re-execute a single run from its record alone."""
    spec = ExperimentSpec(
        map={"kind": record.map_kind, ("r" if record.map_kind == "logistic" else "u"): record.map_param},
        n=record.n, eps=record.eps, l=record.l, sigma=record.sigma, rho=record.rho,
        realizations=record.realization + 1, engines=(record.engine,),
        transient=record.transient, seed=record.master_seed, n_trees=record.n_trees,
        importance_mode=record.importance_mode, k_neighbors=record.k_neighbors,
    )
    (rec,) = _run_job((spec.to_dict(), record.n, record.eps, record.l, record.realization))
    return rec


# ---------------------------------------------------------------- aggregation

def _mean_std(values: list[float]) -> tuple[float, float]:
    # fsum is exactly rounded, so the result ignores record order
    if not values:
        return math.nan, math.nan
    mean = math.fsum(values) / len(values)
    if len(values) < 2:
        return mean, math.nan
    var = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var)


def aggregate(records) -> list[dict]:
    """Mean and sample standard deviation of AUC and mean correlation per
    (grid coordinates, engine); failed runs are counted but not averaged."""
    records = list(records)
    if not records:
        raise ParameterError("nothing to aggregate")
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.grid_key, []).append(r)
    rows = []
    for key in sorted(groups, key=lambda k: (*k[:-1], ENGINES.index(k[-1]))):
        rs = groups[key]
        aucs = [r.auc for r in rs if r.auc is not None]
        corrs = [r.mean_corr for r in rs if r.mean_corr is not None]
        auc_mean, auc_std = _mean_std(aucs)
        corr_mean, corr_std = _mean_std(corrs)
        rows.append({
            "map_kind": key[0], "map_param": key[1], "n": key[2], "eps": key[3], "l": key[4],
            "sigma": key[5], "engine": key[6], "runs": len(rs), "failed": len(rs) - len(aucs),
            "auc_mean": auc_mean, "auc_std": auc_std,
            "corr_mean": corr_mean, "corr_std": corr_std,
        })
    return rows


# ---------------------------------------------------------------- CSV

RECORD_COLUMNS = [f.name for f in fields(RunRecord) if f.name != "wall_time_seconds"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_records(path, records):
    """Write runs as CSV. Wall times go to ``<stem>.timing.csv`` so that the
    main file depends on the master seed alone."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in RECORD_COLUMNS])
    timing = path.with_name(path.stem + ".timing.csv")
    with open(timing, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "eps", "l", "sigma", "realization", "engine", "wall_time_seconds"])
        for r in records:
            w.writerow([r.n, _fmt(r.eps), r.l, _fmt(r.sigma), r.realization, r.engine,
                        f"{r.wall_time_seconds:.6f}"])


def read_records(path) -> list[RunRecord]:
    types = {f.name: f.type for f in fields(RunRecord)}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for k, v in row.items():
                t = types[k]
                if t == "int":
                    kw[k] = int(v)
                elif t == "float":
                    kw[k] = float(v)
                elif t == "float | None":
                    kw[k] = float(v) if v != "" else None
                else:
                    kw[k] = v
            out.append(RunRecord(**kw))
    return out


def write_summary(path, rows: list[dict]):
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([_fmt(v) for v in row.values()])


# ---------------------------------------------------------------- timing

def bench_scaling(n_grid, l: int = 200, engines=("forest", "relieff"), seed: int = 0,
                  eps: float = 0.5, n_trees: int = 1000, k_neighbors: int = 10,
                  repeats: int = 3) -> tuple[list[dict], dict]:
    """Wall time of ranking all nodes versus network size.

    Each cell is the fastest of *repeats* runs on the same panel. Returns
    the table rows and the fitted log-log slope per engine.
    """
    n_grid = [int(n) for n in n_grid]
    if n_grid != sorted(n_grid):
        raise ParameterError("n_grid must be sorted ascending")
    kind = map_from_params({"kind": "logistic", "r": 4.0})

    # compile the kernels outside the timed region
    warm = simulate(generate_er_network(4, 0.5, 0), kind, eps, 40, 0, 0)
    for name in engines:
        cfg = _engine(name, 0, 2, "impurity", 3)
        _score(warm, name, cfg)

    rows = []
    for n in n_grid:
        adj = generate_er_network(n, 0.1, derive_seed(seed, "bench-graph", n))
        panel = simulate(adj, kind, eps, l, 0, derive_seed(seed, "bench-init", n))
        for name in engines:
            cfg = _engine(name, derive_seed(seed, "bench-rank", n, name), n_trees, "impurity", k_neighbors)
            best = math.inf
            for _ in range(repeats):
                t0 = time.perf_counter()
                _score(panel, name, cfg)
                best = min(best, time.perf_counter() - t0)
            rows.append({"n": n, "engine": name, "seconds": best})
    slopes = {}
    for name in engines:
        ns = np.array([r["n"] for r in rows if r["engine"] == name], dtype=float)
        ts = np.array([r["seconds"] for r in rows if r["engine"] == name])
        slopes[name] = float(np.polyfit(np.log(ns), np.log(ts), 1)[0]) if len(ns) > 1 else math.nan
    return rows, slopes


# ---------------------------------------------------------------- profiles

def reproduction_profile(name: str) -> ExperimentSpec:
    """Named desk-scale parameter grids.

    The grids cap network size at N=50 and use 200 trees, so each one
    finishes on a single machine. Pass overrides with :func:`dataclasses.replace`.
    """
    eps6 = (0.01, 0.05, 0.25, 0.5, 0.6, 0.8)
    profiles = {
        "size-coupling": ExperimentSpec(n=(12, 25, 50), eps=eps6, l=(12800,), n_trees=200),
        "length": ExperimentSpec(n=(25,), eps=(0.01, 0.05, 0.25, 0.6), l=(50, 200, 800, 3200, 12800),
                                 n_trees=200),
        "length-size": ExperimentSpec(n=(12, 25, 50), eps=(0.6,), l=(50, 200, 800, 3200, 12800),
                                      n_trees=200),
        "noise": ExperimentSpec(n=(25,), eps=(0.01, 0.05, 0.25, 0.6), l=(12800,),
                                sigma=(0.0, 0.1, 0.25, 0.5, 1.0), n_trees=200),
        "ikeda": ExperimentSpec(map={"kind": "ikeda", "u": 0.9}, n=(25,), eps=eps6, l=(12800,),
                                n_trees=200),
        "short": ExperimentSpec(n=(25,), eps=eps6, l=(50, 800), n_trees=200),
    }
    if name not in profiles:
        raise ParameterError(f"unknown profile {name!r}; choose from {sorted(profiles)}")
    return profiles[name]
