"""Boxes, pixel grids, coverage weights and the pixel rounding functions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# Values closer than this to a grid or half-grid line are treated as lying on it.
_GRID_SNAP = 1e-9


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Box:
    """Closed axis-aligned box ``[lower_1, upper_1] x ... x [lower_n, upper_n]``.

    Degenerate widths (``lower_i == upper_i``) are allowed.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(self.lower)
        upper = _frozen(self.upper)
        if lower.shape != upper.shape:
            raise ValueError(
                f"lower and upper must have the same length, got {lower.size} and {upper.size}"
            )
        if lower.size == 0:
            raise ValueError("a box needs at least one dimension")
        if np.any(~np.isfinite(lower)) or np.any(~np.isfinite(upper)):
            raise ValueError("box bounds must be finite")
        if np.any(lower > upper):
            raise ValueError(f"inverted box: lower {lower.tolist()} > upper {upper.tolist()}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_point(cls, x) -> "Box":
        x = np.asarray(x, dtype=float)
        return cls(x, x)

    @classmethod
    def bounding(cls, points) -> "Box":
        """Smallest box containing every row of ``points``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(pts.min(axis=0), pts.max(axis=0))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def total_width(self) -> float:
        return float(np.sum(self.upper - self.lower))

    def contains_point(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.lower <= x) and np.all(x <= self.upper))

    def contains_points(self, points) -> np.ndarray:
        """Closed membership mask for the rows of ``points``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)

    def open_contains_points(self, points) -> np.ndarray:
        """Strict membership mask, used for neighborhoods ``B(V, pi)``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts > self.lower) & (pts < self.upper), axis=1)

    def contains_box(self, other: "Box") -> bool:
        _check_dims(self, other)
        return bool(np.all(self.lower <= other.lower) and np.all(other.upper <= self.upper))

    def intersects(self, other: "Box") -> bool:
        _check_dims(self, other)
        return bool(np.all(np.maximum(self.lower, other.lower) <= np.minimum(self.upper, other.upper)))

    def union(self, other: "Box") -> "Box":
        return box_union(self, other)

    def intersection(self, other: "Box") -> "Box | None":
        return box_intersection(self, other)

    def as_tuple(self) -> tuple:
        return tuple(self.lower.tolist()), tuple(self.upper.tolist())

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return self.lower.shape == other.lower.shape and bool(
            np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)
        )

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        spans = " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(self.lower, self.upper))
        return f"Box({spans})"


def _check_dims(a: Box, b: Box) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def box_union(a: Box, b: Box) -> Box:
    """Smallest box containing both ``a`` and ``b``."""
    _check_dims(a, b)
    return Box(np.minimum(a.lower, b.lower), np.maximum(a.upper, b.upper))


def box_intersection(a: Box, b: Box) -> Box | None:
    """Common part of two closed boxes, or ``None`` when they are disjoint.

    Boxes that only share a face or a corner intersect.
    """
    _check_dims(a, b)
    lo = np.maximum(a.lower, b.lower)
    hi = np.minimum(a.upper, b.upper)
    if np.any(lo > hi):
        return None
    return Box(lo, hi)


def neighborhood(box: Box, pi: float) -> Box:
    """The offset box ``B(V, pi)``.

    It is stored with closed bounds; callers test point membership with
    :meth:`Box.open_contains_points`.
    """
    if not pi > 0:
        raise ValueError(f"pi must be positive, got {pi}")
    return Box(box.lower - pi, box.upper + pi)


def _signed_face_distances(x: np.ndarray, box: Box) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != box.dim:
        raise ValueError(f"dimension mismatch: point has {x.shape[1]} coordinates, box has {box.dim}")
    return np.minimum((x - box.lower).min(axis=1), (box.upper - x).min(axis=1))


def point_weight(x, box: Box) -> float:
    """Tight coverage weight of a point: zero inside ``box``, negative outside."""
    return float(min(_signed_face_distances(x, box)[0], 0.0))


def point_weights(points, box: Box) -> np.ndarray:
    return np.minimum(_signed_face_distances(points, box), 0.0)


def pixel_weight(centroid, box: Box, pixel_width: float) -> float:
    """Tight weight of a pixel centroid, capped at half a pixel."""
    if not pixel_width > 0:
        raise ValueError(f"pixel width must be positive, got {pixel_width}")
    return float(min(_signed_face_distances(centroid, box)[0], 0.5 * pixel_width))


def pixel_weights(centroids, box: Box, pixel_width: float) -> np.ndarray:
    if not pixel_width > 0:
        raise ValueError(f"pixel width must be positive, got {pixel_width}")
    return np.minimum(_signed_face_distances(centroids, box), 0.5 * pixel_width)


@dataclass(frozen=True, eq=False)
class PixelGrid:
    """Occupied cells of a regular grid with side ``pixel_width``.

    Only non-empty pixels are stored. ``indices[k]`` is the integer lattice
    index of pixel ``k``, ``counts[k]`` the number of points in it and
    ``centroids[k]`` its geometric center.
    """

    pixel_width: float
    origin: np.ndarray
    indices: np.ndarray
    counts: np.ndarray
    centroids: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.origin.size

    @property
    def n_pixels(self) -> int:
        return self.counts.size

    def pixel_box(self, k: int) -> Box:
        lo = self.origin + self.indices[k] * self.pixel_width
        return Box(lo, lo + self.pixel_width)

    def pixel_boxes(self) -> list[Box]:
        return [self.pixel_box(k) for k in range(self.n_pixels)]

    def occupied(self) -> dict:
        """Mapping ``lattice index -> (count, centroid)``."""
        return {
            tuple(int(i) for i in idx): (int(c), cen.copy())
            for idx, c, cen in zip(self.indices, self.counts, self.centroids)
        }


def pixelize(points, pixel_width: float, origin=None) -> PixelGrid:
    """Bin points into pixels of side ``pixel_width`` anchored at ``origin``.

    A point on a pixel boundary goes to the pixel whose lower face it lies on
    (plain floor indexing).
    """
    if not pixel_width > 0:
        raise ValueError(f"pixel width must be positive, got {pixel_width}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if origin is None:
        origin = np.floor(pts.min(axis=0) / pixel_width) * pixel_width
    origin = _frozen(origin)
    if origin.size != pts.shape[1]:
        raise ValueError("origin dimension does not match the points")
    idx = np.floor((pts - origin) / pixel_width).astype(np.int64)
    uniq, counts = np.unique(idx, axis=0, return_counts=True)
    centroids = origin + (uniq + 0.5) * pixel_width
    return PixelGrid(float(pixel_width), origin, uniq, counts.astype(np.int64), centroids)


class RoundingKind(enum.Enum):
    PSI1 = "psi1"
    PSI2 = "psi2"
    PSI3 = "psi3"


def _snap(v: float) -> float:
    # remove float noise around grid and half-grid lines before taking fractional parts
    r = round(2.0 * v) / 2.0
    return r if abs(v - r) <= _GRID_SNAP else v


def _psi_lower(v: float, kind: RoundingKind) -> float:
    fl = math.floor(v)
    frc = v - fl
    if kind is RoundingKind.PSI1:
        return float(math.ceil(v))
    if kind is RoundingKind.PSI2:
        if frc == 0:
            return float(fl)
        return fl + 0.5 if frc <= 0.5 else float(fl + 1)
    return float(fl) if frc <= 0.5 else float(fl + 1)


def _psi_upper(v: float, kind: RoundingKind) -> float:
    fl = math.floor(v)
    frc = v - fl
    if kind is RoundingKind.PSI1:
        return float(fl)
    if kind is RoundingKind.PSI2:
        return fl + 0.5 if frc >= 0.5 else float(fl)
    return float(fl + 1) if frc >= 0.5 else float(fl)


def round_box(box: Box, kind: RoundingKind | str, pixel_width: float = 1.0, origin=None,
              return_clamped: bool = False):
    """Snap the faces of ``box`` to the pixel grid with one of the three roundings.

    Coordinates are mapped to grid units ``(x - origin) / pixel_width``, rounded
    and mapped back. If a thin box would invert, that axis collapses onto the
    grid line nearest its midpoint and the result is reported as clamped.
    """
    kind = RoundingKind(kind) if not isinstance(kind, RoundingKind) else kind
    if not pixel_width > 0:
        raise ValueError(f"pixel width must be positive, got {pixel_width}")
    origin = np.zeros(box.dim) if origin is None else np.asarray(origin, dtype=float)
    lo_g = (box.lower - origin) / pixel_width
    hi_g = (box.upper - origin) / pixel_width
    new_lo = np.empty(box.dim)
    new_hi = np.empty(box.dim)
    clamped = False
    for i in range(box.dim):
        lo = _psi_lower(_snap(lo_g[i]), kind)
        hi = _psi_upper(_snap(hi_g[i]), kind)
        if lo > hi:
            mid = math.floor(0.5 * (lo_g[i] + hi_g[i]) + 0.5)
            lo = hi = float(mid)
            clamped = True
        new_lo[i], new_hi[i] = lo, hi
    out = Box(origin + new_lo * pixel_width, origin + new_hi * pixel_width)
    return (out, clamped) if return_clamped else out
