"""On-disk formats.

* Panel: CSV with header ``node_0,...,node_{N-1}``, one row per time step,
  plus a ``<stem>.meta.json`` sidecar.
* Adjacency: text edge list, first line ``n <N>``, then ``src dst`` lines
  (0-indexed, ``src`` drives ``dst``).
* Importance matrix: headerless N x N CSV plus a ``.meta.json`` sidecar.
* ROC: CSV ``threshold,fpr,tpr`` followed by a closing ``auc,<value>`` line.
* Confusion counts: CSV header ``tp,fp,fn,tn`` and one row of counts.

Floats are written with 17 significant digits so that files round-trip
exactly.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import AdjacencyMatrix, TrajectoryPanel
from .errors import ParameterError
from .evaluation import ConfusionCounts, RocResult
from .ranking.scores import ImportanceMatrix

__all__ = [
    "sidecar_path",
    "write_panel",
    "read_panel",
    "write_adjacency",
    "read_adjacency",
    "write_importance",
    "read_importance",
    "write_roc",
    "read_roc",
    "write_confusion",
    "read_confusion",
]

FLOAT_FMT = "%.17g"


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def _write_meta(path, meta: dict):
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _read_meta(path) -> dict:
    side = sidecar_path(path)
    return json.loads(side.read_text()) if side.exists() else {}


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_panel(path, panel: TrajectoryPanel):
    header = ",".join(f"node_{i}" for i in range(panel.n))
    np.savetxt(path, panel.x.T, delimiter=",", header=header, comments="", fmt=FLOAT_FMT)
    _write_meta(path, panel.meta)


def read_panel(path) -> TrajectoryPanel:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if not all(h == f"node_{i}" for i, h in enumerate(header)):
        raise ParameterError(f"{path}: unexpected panel header")
    x = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return TrajectoryPanel(x.T, _read_meta(path))


def write_adjacency(path, adj: AdjacencyMatrix):
    lines = [f"n {adj.n}"] + [f"{s} {d}" for s, d in adj.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_adjacency(path) -> AdjacencyMatrix:
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or lines[0][0] != "n":
        raise ParameterError(f"{path}: missing 'n <N>' header")
    n = int(lines[0][1])
    return AdjacencyMatrix.from_edges(n, [(int(s), int(d)) for s, d in lines[1:]])


def write_importance(path, f: ImportanceMatrix):
    np.savetxt(path, f.f, delimiter=",", fmt=FLOAT_FMT)
    _write_meta(path, f.meta)


def read_importance(path) -> ImportanceMatrix:
    return ImportanceMatrix(np.loadtxt(path, delimiter=",", ndmin=2), _read_meta(path))


def write_roc(path, roc: RocResult):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold", "fpr", "tpr"])
        for th, x, y in zip(roc.thresholds, roc.fpr, roc.tpr):
            w.writerow([FLOAT_FMT % th, FLOAT_FMT % x, FLOAT_FMT % y])
        w.writerow(["auc", FLOAT_FMT % roc.auc])


def read_roc(path) -> tuple[np.ndarray, float]:
    """Return the ``(threshold, fpr, tpr)`` rows and the auc."""
    rows, auc = [], None
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            if row[0] == "auc":
                auc = float(row[1])
            else:
                rows.append([float(v) for v in row])
    return np.array(rows), auc


def write_confusion(path, c: ConfusionCounts):
    Path(path).write_text("tp,fp,fn,tn\n" + f"{c.tp},{c.fp},{c.fn},{c.tn}\n")


def read_confusion(path) -> ConfusionCounts:
    with open(path, newline="") as fh:
        row = list(csv.DictReader(fh))[0]
    return ConfusionCounts(**{k: int(v) for k, v in row.items()})
