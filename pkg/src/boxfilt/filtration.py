"""Cover sequences, their nerve filtrations and the end-to-end box filtration."""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from .complex import FiltrationComplex, PersistenceDiagram, flag_complex, persistence
from .expansion import (ExpansionProblem, SolverConfig, k_optimal_expansion,
                        largest_optimal_expansion)
from .geometry import Box, PixelGrid, pixelize

__all__ = [
    "CoverSequence",
    "ExpansionStepError",
    "initial_point_cover",
    "initial_pixel_cover",
    "compute_m",
    "expand_cover",
    "nerve_filtration",
    "check_helly",
    "box_filtration",
    "resolve_threads",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 256


class ExpansionStepError(RuntimeError):
    """A solver failure annotated with the pivot and step it happened at."""

    def __init__(self, pivot: int, step: int, cause: Exception):
        super().__init__(f"expansion failed at pivot {pivot}, step {step}: {cause}")
        self.pivot = pivot
        self.step = step


@dataclass(eq=False)
class CoverSequence:
    """Expanded boxes ``V[j pi]`` for every pivot, ``j = 0..m``.

    ``lower`` and ``upper`` have shape ``(n_pivots, m + 1, dim)``.
    """

    pivots: list
    pi: float
    m: int
    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)

    @property
    def n_pivots(self) -> int:
        return len(self.pivots)

    def box(self, pivot: int, step: int) -> Box:
        return Box(self.lower[pivot, step], self.upper[pivot, step])

    def boxes_at(self, step: int) -> list[Box]:
        return [self.box(p, step) for p in range(self.n_pivots)]

    def sequence(self, pivot: int) -> list[Box]:
        return [self.box(pivot, j) for j in range(self.m + 1)]

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.lower, axis=1) <= 0) and np.all(np.diff(self.upper, axis=1) >= 0))


def initial_point_cover(points, merge_radius: float | None = None) -> tuple[list[Box], list[np.ndarray]]:
    """Pivot boxes for a point cover and the point indices each one holds.

    By default each distinct point is a degenerate box. With ``merge_radius``
    points joined by chains of l-infinity steps of at most that size share one
    pivot, the bounding box of the group.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("the point cloud is empty")
    if merge_radius is not None and merge_radius < 0:
        raise ValueError("merge_radius must be non-negative")
    r = 0.0 if merge_radius is None else float(merge_radius)
    if pts.shape[0] == 1:
        labels = np.zeros(1, dtype=int)
    else:
        adj = squareform(pdist(pts, "chebyshev")) <= r
        labels = connected_components(adj, directed=False)[1]
    # order groups by their first member so pivots follow input order
    _, first = np.unique(labels, return_index=True)
    groups = [np.flatnonzero(labels == labels[i]) for i in np.sort(first)]
    return [Box.bounding(pts[g]) for g in groups], groups


def initial_pixel_cover(points, pixel_width: float, origin=None) -> tuple[list[Box], PixelGrid]:
    """One pivot per occupied pixel, equal to the pixel itself."""
    grid = pixelize(points, pixel_width, origin)
    return grid.pixel_boxes(), grid


def _outside_linf(box: Box, sites: np.ndarray) -> np.ndarray:
    return np.maximum(np.maximum(box.lower - sites, sites - box.upper), 0.0).max(axis=1)


def compute_m(pivots, sites, pi: float, max_steps: int | None = DEFAULT_MAX_STEPS) -> int:
    """Smallest ``m`` with every site inside the open ``B(V, m pi)`` of every pivot.

    ``sites`` are data points or occupied-pixel centroids. The result is capped
    at ``max_steps`` with a warning.
    """
    if not pi > 0:
        raise ValueError(f"pi must be positive, got {pi}")
    if len(pivots) == 0:
        raise ValueError("no pivots")
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    dmax = max(float(_outside_linf(V, sites).max()) for V in pivots)
    m = int(np.floor(dmax / pi)) + 1
    if max_steps is not None and m > max_steps:
        warnings.warn(f"m={m} exceeds max_steps={max_steps}; the filtration is truncated",
                      RuntimeWarning, stacklevel=2)
        m = int(max_steps)
    return m


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: ``BOXFILT_THREADS`` wins over ``threads``, default all cores."""
    env = os.environ.get("BOXFILT_THREADS")
    if env:
        threads = int(env)
    if threads is None:
        threads = os.cpu_count() or 1
    return max(1, int(threads))


def _grow(args):
    idx, pivot, data, cover, pi, alpha, m, k, config = args
    lo = np.empty((m + 1, pivot.dim))
    hi = np.empty((m + 1, pivot.dim))
    lo[0], hi[0] = pivot.lower, pivot.upper
    V = pivot
    for j in range(1, m + 1):
        try:
            if cover == "point":
                prob = ExpansionProblem.for_points(V, data, alpha, pi, anchor=pivot, radius=j * pi)
            else:
                prob = ExpansionProblem.for_pixels(V, data, alpha, pi, anchor=pivot, radius=j * pi)
            sol = (largest_optimal_expansion(prob, config) if k is None
                   else k_optimal_expansion(prob, config, k))
        except Exception as exc:  # noqa: BLE001 - re-raised with context
            raise ExpansionStepError(idx, j, exc) from exc
        W = sol.box
        if not W.contains_box(V):
            raise AssertionError(f"cover not monotone at pivot {idx}, step {j}")
        V = W
        lo[j], hi[j] = V.lower, V.upper
    return lo, hi


def expand_cover(pivots, data, pi: float, alpha: float, m: int | None = None,
                 k: int | None = None, config: SolverConfig | None = None,
                 threads: int | None = 1, max_steps: int | None = DEFAULT_MAX_STEPS) -> CoverSequence:
    """Grow every pivot for ``m`` steps.

    Step ``j`` expands ``V[(j - 1) pi]`` inside ``B(V, j pi)``, the neighborhood
    of the *original* pivot. ``data`` is a point array (point cover) or a
    :class:`PixelGrid` (pixel cover). ``k=None`` uses the largest optimal
    expansion, otherwise the k-optimal one.
    """
    config = config or SolverConfig()
    cover = "pixel" if isinstance(data, PixelGrid) else "point"
    if cover == "point":
        data = np.atleast_2d(np.asarray(data, dtype=float))
    sites = data.centroids if cover == "pixel" else data
    if m is None:
        m = compute_m(pivots, sites, pi, max_steps)
    jobs = [(i, V, data, cover, float(pi), float(alpha), int(m), k, config) for i, V in enumerate(pivots)]
    workers = min(resolve_threads(threads), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_grow, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_grow(job) for job in jobs]
    lower = np.stack([r[0] for r in results])
    upper = np.stack([r[1] for r in results])
    return CoverSequence(list(pivots), float(pi), int(m), lower, upper)


def _first_intersection(cover: CoverSequence) -> np.ndarray:
    """``first[a, b]`` = first step at which boxes a and b meet, or -1."""
    P = cover.n_pivots
    first = np.full((P, P), -1, dtype=np.int64)
    for j in range(cover.m + 1):
        lo, hi = cover.lower[:, j], cover.upper[:, j]
        meet = np.all(np.maximum(lo[:, None], lo[None]) <= np.minimum(hi[:, None], hi[None]), axis=2)
        first[(first < 0) & meet] = j
    return first


def nerve_filtration(cover: CoverSequence, max_dim: int = 2) -> FiltrationComplex:
    """Flag filtration of the nerves ``Nrv(U(j pi))``.

    An edge enters at the first step its two boxes intersect; boxes satisfy the
    Helly property, so higher simplices enter with their last edge. Values are
    step indices and ``scale`` is ``pi``.
    """
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    first = _first_intersection(cover)
    a, b = np.triu_indices(cover.n_pivots, 1)
    keep = first[a, b] >= 0
    return flag_complex(cover.n_pivots, np.column_stack([a[keep], b[keep]]), first[a, b][keep],
                        max_dim, scale=cover.pi)


def check_helly(cover: CoverSequence, cx: FiltrationComplex) -> bool:
    """Brute-force check that every simplex's boxes share a point at its step."""
    for d in range(2, cx.max_dim + 1):
        for s, v in zip(cx.simplices[d], cx.values[d]):
            j = int(v)
            lo = cover.lower[s, j].max(axis=0)
            hi = cover.upper[s, j].min(axis=0)
            if np.any(lo > hi):
                return False
    return True


def box_filtration(points, alpha: float, pi: float, cover: str = "point",
                   pixel_width: float | None = None, k: int | None = None, max_dim: int = 2,
                   merge_radius: float | None = None, max_steps: int | None = DEFAULT_MAX_STEPS,
                   config: SolverConfig | None = None, threads: int | None = 1,
                   debug: bool = False) -> tuple[CoverSequence, FiltrationComplex, PersistenceDiagram]:
    """Initial cover, growth, nerve and persistence in one call.

    Homology is computed in dimensions ``0..max_dim - 1``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if cover == "point":
        pivots, _ = initial_point_cover(pts, merge_radius)
        data = pts
    elif cover == "pixel":
        if pixel_width is None:
            raise ValueError("pixel cover needs pixel_width")
        pivots, data = initial_pixel_cover(pts, pixel_width)
    else:
        raise ValueError(f"cover must be 'point' or 'pixel', got {cover!r}")
    seq = expand_cover(pivots, data, pi, alpha, k=k, config=config, threads=threads, max_steps=max_steps)
    if not seq.is_monotone():
        raise AssertionError("cover sequence is not monotone")
    cx = nerve_filtration(seq, max_dim)
    if debug and not check_helly(seq, cx):
        raise AssertionError("a flag simplex has an empty box intersection")
    log.debug("box filtration: %d pivots, m=%d, %d simplices", seq.n_pivots, seq.m, len(cx))
    return seq, cx, persistence(cx, max_dim - 1)
