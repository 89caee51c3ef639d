"""Bottleneck distance, Rand score, classical MDS and seeded k-means."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from sklearn.metrics import rand_score as _sk_rand_score

from .complex import PersistenceDiagram

__all__ = [
    "bottleneck_distance",
    "distance_matrix",
    "rand_score",
    "classical_mds",
    "KMeansResult",
    "kmeans",
    "kmeans_fit",
]


def _split(d, dim):
    if isinstance(d, PersistenceDiagram):
        p = d.pairs(dim)
    else:
        p = np.asarray(d, dtype=float).reshape(-1, 2)
    if np.any(p[:, 1] < p[:, 0]):
        raise ValueError("diagram points need birth <= death")
    fin = np.isfinite(p[:, 1])
    return p[fin], np.sort(p[~fin, 0])


def _feasible(A, B, eps, cross, diag_a, diag_b):
    ka, kb = len(A), len(B)
    n = ka + kb
    # rows: A then diagonal slots for B; columns: B then diagonal slots for A
    rows, cols = [], []
    ia, jb = np.nonzero(cross <= eps)
    rows.append(ia)
    cols.append(jb)
    a_diag = np.flatnonzero(diag_a <= eps)
    rows.append(a_diag)
    cols.append(kb + a_diag)
    b_diag = np.flatnonzero(diag_b <= eps)
    rows.append(ka + b_diag)
    cols.append(b_diag)
    dr, dc = np.meshgrid(np.arange(kb), np.arange(ka), indexing="ij")
    rows.append(ka + dr.ravel())
    cols.append(kb + dc.ravel())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    g = csr_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(n, n))
    match = maximum_bipartite_matching(g, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck_distance(d1, d2, dim: int = 1) -> float:
    """Bottleneck distance between the dimension-``dim`` parts of two diagrams.

    Diagrams may be :class:`PersistenceDiagram` objects or ``(k, 2)`` arrays.
    Essential classes are matched among themselves by birth; unequal counts
    give ``inf``.
    """
    A, ea = _split(d1, dim)
    B, eb = _split(d2, dim)
    if ea.size != eb.size:
        return math.inf
    ess = float(np.max(np.abs(ea - eb))) if ea.size else 0.0
    if len(A) == 0 and len(B) == 0:
        return ess
    diag_a = 0.5 * (A[:, 1] - A[:, 0])
    diag_b = 0.5 * (B[:, 1] - B[:, 0])
    if len(A) and len(B):
        cross = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2)
    else:
        cross = np.zeros((len(A), len(B)))
    cand = np.unique(np.concatenate([[0.0], cross.ravel(), diag_a, diag_b]))
    lo, hi = 0, cand.size - 1
    # the largest candidate always admits a matching (everything to the diagonal)
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(A, B, cand[mid], cross, diag_a, diag_b):
            hi = mid
        else:
            lo = mid + 1
    return max(ess, float(cand[lo]))


def distance_matrix(diagrams, dim: int = 1) -> np.ndarray:
    """Pairwise bottleneck distances between a list of diagrams."""
    n = len(diagrams)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = bottleneck_distance(diagrams[i], diagrams[j], dim)
    return D


def rand_score(labels_a, labels_b) -> float:
    """Fraction of point pairs on which two labelings agree."""
    a = np.asarray(labels_a).reshape(-1)
    b = np.asarray(labels_b).reshape(-1)
    if a.size != b.size:
        raise ValueError(f"label lists differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("need at least two labels")
    return float(_sk_rand_score(a, b))


def classical_mds(D, out_dim: int = 2) -> np.ndarray:
    """Torgerson MDS: top eigenpairs of the double-centred squared distances.

    Negative eigenvalues are truncated to zero. Each axis is signed so that its
    largest-magnitude coordinate is positive, which makes the output deterministic.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    n = D.shape[0]
    if out_dim < 1 or out_dim > n:
        raise ValueError(f"out_dim must lie in [1, {n}]")
    if not np.allclose(D, D.T, atol=1e-12, rtol=0):
        raise ValueError("distance matrix must be symmetric")
    if np.any(np.abs(np.diag(D)) > 1e-12):
        raise ValueError("distance matrix needs a zero diagonal")
    J = np.eye(n) - 1.0 / n
    G = -0.5 * J @ (D ** 2) @ J
    vals, vecs = np.linalg.eigh(0.5 * (G + G.T))
    order = np.argsort(vals)[::-1][:out_dim]
    vals = np.clip(vals[order], 0.0, None)
    vecs = vecs[:, order]
    for c in range(out_dim):
        i = int(np.argmax(np.abs(vecs[:, c])))
        if vecs[i, c] < 0:
            vecs[:, c] = -vecs[:, c]
    return vecs * np.sqrt(vals)


@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    wcss: float
    history: list = field(default_factory=list)
    n_iter: int = 0


def _kmeanspp(X, k, rng):
    n = len(X)
    centers = [X[rng.integers(n)]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        tot = d2.sum()
        if tot <= 0:
            # every point already coincides with a center
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / tot))
        centers.append(X[idx])
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return np.array(centers, dtype=float)


def _assign(X, C):
    d2 = np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=2)
    lab = np.argmin(d2, axis=1)
    return lab, d2[np.arange(len(X)), lab]


def kmeans_fit(points, k: int, seed: int = 0, max_iters: int = 300) -> KMeansResult:
    """Lloyd iterations from k-means++ seeds drawn with ``default_rng(seed)``.

    ``history`` holds the within-cluster sum of squares after each assignment.
    An empty cluster is moved onto the point farthest from its center.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(X)
    if k < 1:
        raise ValueError("k must be positive")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points {n}")
    rng = np.random.default_rng(seed)
    C = _kmeanspp(X, k, rng)
    labels, d2 = _assign(X, C)
    history = [float(d2.sum())]
    it = 0
    for it in range(1, max_iters + 1):
        newC = C.copy()
        taken = set()
        for c in range(k):
            members = labels == c
            if members.any():
                newC[c] = X[members].mean(axis=0)
        for c in range(k):
            if not np.any(labels == c):
                order = np.argsort(-d2, kind="stable")
                far = next(int(i) for i in order if int(i) not in taken)
                taken.add(far)
                newC[c] = X[far]
                d2[far] = 0.0
        new_labels, new_d2 = _assign(X, newC)
        C = newC
        history.append(float(new_d2.sum()))
        done = np.array_equal(new_labels, labels)
        labels, d2 = new_labels, new_d2
        if done:
            break
    return KMeansResult(labels, C, float(d2.sum()), history, it)


def kmeans(points, k: int, seed: int = 0, max_iters: int = 300) -> np.ndarray:
    """Cluster labels from :func:`kmeans_fit`."""
    return kmeans_fit(points, k, seed, max_iters).labels
