"""Box mapper: k-means pivots grown by one largest optimal expansion."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .expansion import ExpansionProblem, SolverConfig, largest_optimal_expansion
from .geometry import Box, pixelize
from .metrics import kmeans

__all__ = ["MapperGraph", "box_mapper", "export_mapper"]


@dataclass(eq=False)
class MapperGraph:
    """Nodes are expanded boxes with the points they contain; edges join intersecting boxes."""

    boxes: list
    members: list
    edges: list
    labels: np.ndarray = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.boxes)

    def n_components(self) -> int:
        n = self.n_nodes
        if n == 0:
            return 0
        e = np.asarray(self.edges, dtype=int).reshape(-1, 2)
        g = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
        return int(connected_components(g, directed=False)[0])

    def cycle_rank(self) -> int:
        """First Betti number of the graph, ``E - V + C``."""
        return len(self.edges) - self.n_nodes + self.n_components()

    def to_dict(self) -> dict:
        return {
            "nodes": [{"id": i, "lower": b.lower.tolist(), "upper": b.upper.tolist(),
                       "members": [int(x) for x in m]}
                      for i, (b, m) in enumerate(zip(self.boxes, self.members))],
            "edges": [[int(a), int(b)] for a, b in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MapperGraph":
        nodes = sorted(data["nodes"], key=lambda nd: nd["id"])
        return cls([Box(nd["lower"], nd["upper"]) for nd in nodes],
                   [list(nd["members"]) for nd in nodes],
                   [tuple(e) for e in data["edges"]])

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_dot(self) -> str:
        lines = ["graph mapper {"]
        for i, m in enumerate(self.members):
            lines.append(f'  {i} [label="{len(m)}"];')
        for a, b in self.edges:
            lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def box_mapper(points, k: int, pi: float, alpha: float, seed: int = 0, cover: str = "point",
               pixel_width: float | None = None, config: SolverConfig | None = None) -> MapperGraph:
    """Cluster with k-means, grow each cluster's bounding box once, take the nerve.

    Node membership is every point inside the grown box, so nodes may overlap.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if k > len(pts):
        raise ValueError(f"k={k} exceeds the number of points {len(pts)}")
    if not pi > 0:
        raise ValueError("pi must be positive")
    labels = kmeans(pts, k, seed)
    grid = None
    if cover == "pixel":
        if pixel_width is None:
            raise ValueError("pixel cover needs pixel_width")
        grid = pixelize(pts, pixel_width)
    elif cover != "point":
        raise ValueError(f"cover must be 'point' or 'pixel', got {cover!r}")
    boxes = []
    for c in range(k):
        pivot = Box.bounding(pts[labels == c])
        if grid is None:
            prob = ExpansionProblem.for_points(pivot, pts, alpha, pi)
        else:
            prob = ExpansionProblem.for_pixels(pivot, grid, alpha, pi)
        boxes.append(largest_optimal_expansion(prob, config).box)
    members = [np.flatnonzero(b.contains_points(pts)).tolist() for b in boxes]
    edges = [(a, b) for a in range(k) for b in range(a + 1, k) if boxes[a].intersects(boxes[b])]
    return MapperGraph(boxes, members, edges, labels)


def export_mapper(graph: MapperGraph, fmt: str = "json") -> str:
    if fmt == "json":
        return graph.to_json(indent=2) + "\n"
    if fmt == "dot":
        return graph.to_dot()
    raise ValueError(f"unknown format {fmt!r}; use 'json' or 'dot'")
