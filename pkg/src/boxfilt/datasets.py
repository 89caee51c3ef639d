"""Seeded synthetic point clouds used in the experiments.

Every generator draws from ``numpy.random.default_rng(seed)`` (PCG64), so a
given seed produces the same cloud on every platform.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "gen_noisy_circle",
    "gen_noisy_ellipse",
    "gen_circle_with_cluster",
    "gen_concentric",
    "add_gaussian_noise",
    "GENERATORS",
    "ELLIPSE_CENTER",
]

SCALE = 100.0
# center of the ellipse after the anisotropic scaling; the rotation is about this point
ELLIPSE_CENTER = np.array([100.0, 20.0])


def _check_counts(*counts):
    for c in counts:
        if int(c) != c or c < 0:
            raise ValueError(f"counts must be non-negative integers, got {c}")


def _circle(rng, n, radius=1.0):
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    return np.column_stack([1.0 + radius * np.cos(t), 1.0 + radius * np.sin(t)])


def gen_noisy_circle(n_circle: int = 100, n_noise: int = 50, seed: int = 0) -> np.ndarray:
    """Unit circle at (1, 1) plus uniform noise in [0, 2]^2, scaled by 100."""
    _check_counts(n_circle, n_noise)
    rng = np.random.default_rng(seed)
    pts = np.vstack([_circle(rng, n_circle), rng.uniform(0.0, 2.0, (n_noise, 2))])
    return SCALE * pts


def gen_noisy_ellipse(n_circle: int = 100, n_noise: int = 50, seed: int = 0) -> np.ndarray:
    """The noisy circle with x scaled by 100 and y by 20, then rotated by 45 degrees.

    The rotation is about the ellipse center (100, 20).
    """
    _check_counts(n_circle, n_noise)
    rng = np.random.default_rng(seed)
    pts = np.vstack([_circle(rng, n_circle), rng.uniform(0.0, 2.0, (n_noise, 2))])
    pts = pts * np.array([100.0, 20.0])
    c = s = np.sqrt(0.5)
    rot = np.array([[c, -s], [s, c]])
    return (pts - ELLIPSE_CENTER) @ rot.T + ELLIPSE_CENTER


def gen_circle_with_cluster(n_circle: int = 75, n_cluster: int = 100, cluster_noise: float = 0.2,
                            seed: int = 0) -> np.ndarray:
    """Unit circle at (1, 1) with an isotropic Gaussian cluster at its center, scaled by 100."""
    _check_counts(n_circle, n_cluster)
    if cluster_noise < 0:
        raise ValueError("cluster_noise must be non-negative")
    rng = np.random.default_rng(seed)
    cluster = 1.0 + cluster_noise * rng.standard_normal((n_cluster, 2))
    return SCALE * np.vstack([_circle(rng, n_circle), cluster])


def gen_concentric(n_inner: int = 100, n_outer: int = 75, n_noise: int = 20, seed: int = 0,
                   r_inner: float = 0.5, r_outer: float = 1.0) -> np.ndarray:
    """Two circles about (1, 1) with uniform noise in [0, 2]^2, scaled by 100."""
    _check_counts(n_inner, n_outer, n_noise)
    rng = np.random.default_rng(seed)
    pts = np.vstack([_circle(rng, n_inner, r_inner), _circle(rng, n_outer, r_outer),
                     rng.uniform(0.0, 2.0, (n_noise, 2))])
    return SCALE * pts


def add_gaussian_noise(points, sigma: float, seed: int = 0) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2) noise to every coordinate."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    pts = np.asarray(points, dtype=float)
    if sigma == 0:
        return pts.copy()
    rng = np.random.default_rng(seed)
    return pts + sigma * rng.standard_normal(pts.shape)


GENERATORS = {
    "circle": gen_noisy_circle,
    "ellipse": gen_noisy_ellipse,
    "cluster": gen_circle_with_cluster,
    "concentric": gen_concentric,
}
