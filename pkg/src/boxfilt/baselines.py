"""Vietoris-Rips and distance-to-measure filtrations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .complex import FiltrationComplex, flag_complex

__all__ = ["DtmParams", "vr_filtration", "dtm_values", "dtm_filtration"]


@dataclass(frozen=True)
class DtmParams:
    """Mass parameter ``m`` in (0, 1); the filtration uses the p = 1 mix."""

    m: float
    p: int = 1

    def __post_init__(self):
        if not 0.0 < self.m < 1.0:
            raise ValueError(f"m must lie in (0, 1), got {self.m}")
        if self.p != 1:
            raise ValueError("only p = 1 is supported")

    def k(self, n_points: int) -> int:
        return int(math.ceil(self.m * n_points - 1e-12))


def _cloud(points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("the point cloud is empty")
    return pts


def _graph(n, weights, max_scale):
    a, b = np.triu_indices(n, 1)
    w = weights[a, b]
    keep = w <= max_scale if max_scale is not None else np.ones(w.size, dtype=bool)
    return np.column_stack([a[keep], b[keep]]), w[keep]


def vr_filtration(points, max_scale: float | None = None, max_dim: int = 2) -> FiltrationComplex:
    """Flag complex with edges at their Euclidean length (up to ``max_scale``)."""
    if max_scale is not None and not max_scale > 0:
        raise ValueError("max_scale must be positive")
    pts = _cloud(points)
    D = squareform(pdist(pts)) if len(pts) > 1 else np.zeros((1, 1))
    edges, w = _graph(len(pts), D, max_scale)
    return flag_complex(len(pts), edges, w, max_dim)


def dtm_values(points, m: float) -> np.ndarray:
    """Root mean squared distance to the ``k = ceil(m |X|)`` nearest other points."""
    pts = _cloud(points)
    params = m if isinstance(m, DtmParams) else DtmParams(float(m))
    n = len(pts)
    k = max(1, params.k(n))
    if k >= n:
        raise ValueError(f"k={k} nearest neighbors need more than {n} points; lower m")
    D = squareform(pdist(pts))
    np.fill_diagonal(D, np.inf)
    nearest = np.sort(D, axis=1)[:, :k]
    return np.sqrt(np.mean(nearest ** 2, axis=1))


def dtm_filtration(points, m: float | DtmParams, max_scale: float | None = None,
                   max_dim: int = 2) -> FiltrationComplex:
    """Weighted Rips filtration with vertex values ``f(x)`` from :func:`dtm_values`.

    An edge enters at ``max(f(x), f(y), (|x - y| + f(x) + f(y)) / 2)``.
    """
    pts = _cloud(points)
    f = dtm_values(pts, m)
    D = squareform(pdist(pts))
    E = np.maximum(np.maximum(f[:, None], f[None, :]), 0.5 * (D + f[:, None] + f[None, :]))
    edges, w = _graph(len(pts), E, max_scale)

    return flag_complex(len(pts), edges, w, max_dim, vertex_values=f)
