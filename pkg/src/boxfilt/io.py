"""Point, distance-matrix, label and diagram files."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .complex import PersistenceDiagram

__all__ = [
    "read_points", "write_points", "read_distance_matrix", "write_distance_matrix",
    "read_labels", "write_labels", "read_diagram", "write_diagram",
]


def _is_numeric(row) -> bool:
    try:
        [float(x) for x in row]
    except ValueError:
        return False
    return True


def read_points(path) -> np.ndarray:
    """CSV with one point per row; a non-numeric first row is taken as a header."""
    text = Path(path).read_text(encoding="utf-8-sig")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and not _is_numeric(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no points")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ValueError(f"{path}: row {i + 1} has {len(r)} columns, expected {width}")
        if not _is_numeric(r):
            raise ValueError(f"{path}: row {i + 1} is not numeric")
    return np.array([[float(x) for x in r] for r in rows])


def write_points(path, points, header: list[str] | None = None) -> None:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        for p in pts:
            w.writerow([repr(float(x)) for x in p])


def read_distance_matrix(path) -> np.ndarray:
    D = np.loadtxt(path, delimiter=",", ndmin=2)
    if D.shape[0] != D.shape[1]:
        raise ValueError(f"{path}: distance matrix is not square")
    return D


def write_distance_matrix(path, D) -> None:
    np.savetxt(path, np.asarray(D, dtype=float), delimiter=",", fmt="%.17g")


def read_labels(path) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    return np.array([int(ln) for ln in lines if ln], dtype=int)


def write_labels(path, labels) -> None:
    Path(path).write_text("".join(f"{int(x)}\n" for x in labels), encoding="utf-8")


def read_diagram(path) -> PersistenceDiagram:
    return PersistenceDiagram.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_diagram(path, dgm: PersistenceDiagram) -> None:
    Path(path).write_text(dgm.to_json(indent=1) + "\n", encoding="utf-8")
