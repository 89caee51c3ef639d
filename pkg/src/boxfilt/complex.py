"""Filtered flag complexes and Z/2 persistence by column reduction."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

__all__ = ["FiltrationComplex", "PersistenceDiagram", "flag_complex", "persistence"]


@dataclass(eq=False)
class FiltrationComplex:
    """Simplices with filtration values, stored per dimension.

    ``simplices[d]`` is an ``(N_d, d + 1)`` array of sorted vertex ids and
    ``values[d]`` the matching filtration values. For box filtrations the
    values are step indices and ``scale`` (= pi) turns them into lengths.
    """

    n_vertices: int
    simplices: list
    values: list
    scale: float = 1.0

    @property
    def max_dim(self) -> int:
        return len(self.simplices) - 1

    def __len__(self):
        return int(sum(len(v) for v in self.values))

    def items(self):
        """``(vertex tuple, value)`` pairs in filtration order."""
        rows = [(float(v), d, tuple(int(i) for i in s))
                for d in range(len(self.simplices))
                for s, v in zip(self.simplices[d], self.values[d])]
        rows.sort()
        return [(s, v) for v, _, s in rows]

    def edge_values(self) -> dict:
        return {(int(a), int(b)): float(v) for (a, b), v in zip(self.simplices[1], self.values[1])}

    def dump(self) -> str:
        """One simplex per line as ``j: v0 v1 ...``."""
        lines = []
        for s, v in self.items():
            j = int(v) if float(v).is_integer() else v
            lines.append(f"{j}: " + " ".join(map(str, s)))
        return "\n".join(lines) + "\n"

    def restrict(self, value: float) -> "FiltrationComplex":
        """Subcomplex of simplices with value at most ``value``."""
        keep = [vals <= value for vals in self.values]
        return FiltrationComplex(self.n_vertices, [s[k] for s, k in zip(self.simplices, keep)],
                                 [v[k] for v, k in zip(self.values, keep)], self.scale)


@njit(cache=True)
def _extend_cliques(S, vals, adj):
    """Cofaces of the cliques in ``S`` obtained by appending a larger vertex."""
    n = adj.shape[0]
    N, k = S.shape
    count = 0
    for i in range(N):
        for c in range(S[i, k - 1] + 1, n):
            ok = True
            for t in range(k):
                if not np.isfinite(adj[S[i, t], c]):
                    ok = False
                    break
            if ok:
                count += 1
    out = np.empty((count, k + 1), dtype=np.int64)
    out_v = np.empty(count)
    r = 0
    for i in range(N):
        for c in range(S[i, k - 1] + 1, n):
            v = vals[i]
            ok = True
            for t in range(k):
                e = adj[S[i, t], c]
                if not np.isfinite(e):
                    ok = False
                    break
                if e > v:
                    v = e
            if ok:
                out[r, :k] = S[i]
                out[r, k] = c
                out_v[r] = v
                r += 1
    return out, out_v


def flag_complex(n_vertices: int, edges, edge_values, max_dim: int, vertex_values=None,
                 scale: float = 1.0) -> FiltrationComplex:
    """Clique complex of a weighted graph up to ``max_dim``.

    A simplex enters at the largest value among its edges (and vertices).
    """
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    ev = np.asarray(edge_values, dtype=float).reshape(-1)
    vv = np.zeros(n_vertices) if vertex_values is None else np.asarray(vertex_values, dtype=float)
    edges = np.sort(edges, axis=1)
    if np.any(edges[:, 0] == edges[:, 1]):
        raise ValueError("self loops are not simplices")
    ev = np.maximum(ev, np.maximum(vv[edges[:, 0]], vv[edges[:, 1]])) if len(edges) else ev
    adj = np.full((n_vertices, n_vertices), np.inf)
    adj[edges[:, 0], edges[:, 1]] = ev
    adj[edges[:, 1], edges[:, 0]] = ev
    order = np.lexsort((edges[:, 1], edges[:, 0])) if len(edges) else np.zeros(0, dtype=int)
    simplices = [np.arange(n_vertices, dtype=np.int64).reshape(-1, 1), edges[order]]
    values = [vv.copy(), ev[order]]
    for _ in range(2, max_dim + 1):
        S, v = _extend_cliques(simplices[-1], values[-1], adj)
        simplices.append(S)
        values.append(v)
    return FiltrationComplex(n_vertices, simplices, values, scale)


@dataclass(eq=False)
class PersistenceDiagram:
    """Persistence pairs; ``births``/``deaths`` are already multiplied by ``scale``."""

    dims: np.ndarray
    births: np.ndarray
    deaths: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        self.dims = np.asarray(self.dims, dtype=np.int64).reshape(-1)
        self.births = np.asarray(self.births, dtype=float).reshape(-1)
        self.deaths = np.asarray(self.deaths, dtype=float).reshape(-1)
        if not (self.dims.size == self.births.size == self.deaths.size):
            raise ValueError("dims, births and deaths must have equal length")
        if np.any(self.deaths < self.births):
            raise ValueError("every pair needs birth <= death")

    def __len__(self):
        return self.dims.size

    def pairs(self, dim: int | None = None) -> np.ndarray:
        """``(k, 2)`` array of (birth, death), optionally for one dimension, sorted."""
        m = np.ones(self.dims.size, dtype=bool) if dim is None else self.dims == dim
        out = np.column_stack([self.births[m], self.deaths[m]])
        return out[np.lexsort((out[:, 1], out[:, 0]))] if len(out) else out.reshape(0, 2)

    def finite(self, dim: int) -> np.ndarray:
        p = self.pairs(dim)
        return p[np.isfinite(p[:, 1])]

    def essential(self, dim: int) -> np.ndarray:
        p = self.pairs(dim)
        return p[~np.isfinite(p[:, 1]), 0]

    def lifetimes(self, dim: int) -> np.ndarray:
        """Finite lifetimes in decreasing order."""
        p = self.finite(dim)
        return np.sort(p[:, 1] - p[:, 0])[::-1]

    def to_dict(self) -> dict:
        rows = sorted(zip(self.dims.tolist(), self.births.tolist(), self.deaths.tolist()),
                      key=lambda r: (r[0], r[1], r[2]))
        return {"scale": self.scale,
                "pairs": [{"dim": d, "birth": b, "death": (x if math.isfinite(x) else "inf")}
                          for d, b, x in rows]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "PersistenceDiagram":
        pairs = data.get("pairs", [])
        deaths = [math.inf if p["death"] in ("inf", "Infinity", None) else float(p["death"]) for p in pairs]
        return cls([p["dim"] for p in pairs], [float(p["birth"]) for p in pairs], deaths,
                   float(data.get("scale", 1.0)))

    @classmethod
    def from_json(cls, text: str) -> "PersistenceDiagram":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@njit(cache=True)
def _reduce(faces, n_rows, target):
    """Column reduction over Z/2.

    ``faces[j]`` holds the (row-sorted) boundary of column ``j``; columns come
    in filtration order. Returns ``pivot_of_col`` (-1 for zero columns) and stops
    early once ``target`` pivots are found (``target < 0`` disables this).
    """
    n_cols, width = faces.shape
    low_owner = np.full(n_rows, -1, dtype=np.int64)
    pivot_of_col = np.full(n_cols, -1, dtype=np.int64)
    cap = max(16, 4 * n_cols)
    pool = np.empty(cap, dtype=np.int64)
    start = np.zeros(n_cols, dtype=np.int64)
    length = np.zeros(n_cols, dtype=np.int64)
    used = 0
    found = 0
    col = np.empty(0, dtype=np.int64)
    for j in range(n_cols):
        if target >= 0 and found >= target:
            break
        col = faces[j].copy()
        while col.size > 0:
            o = low_owner[col[-1]]
            if o < 0:
                break
            other = pool[start[o]:start[o] + length[o]]
            merged = np.empty(col.size + other.size, dtype=np.int64)
            a = 0
            b = 0
            r = 0
            while a < col.size and b < other.size:
                if col[a] < other[b]:
                    merged[r] = col[a]
                    a += 1
                    r += 1
                elif col[a] > other[b]:
                    merged[r] = other[b]
                    b += 1
                    r += 1
                else:
                    a += 1
                    b += 1
            while a < col.size:
                merged[r] = col[a]
                a += 1
                r += 1
            while b < other.size:
                merged[r] = other[b]
                b += 1
                r += 1
            col = merged[:r]
        if col.size == 0:
            continue
        if used + col.size > cap:
            while used + col.size > cap:
                cap *= 2
            grown = np.empty(cap, dtype=np.int64)
            grown[:used] = pool[:used]
            pool = grown
        pool[used:used + col.size] = col
        start[j] = used
        length[j] = col.size
        used += col.size
        low_owner[col[-1]] = j
        pivot_of_col[j] = col[-1]
        found += 1
    return pivot_of_col


def _order(simplices: np.ndarray, values: np.ndarray) -> np.ndarray:
    keys = [simplices[:, i] for i in range(simplices.shape[1] - 1, -1, -1)] + [values]
    return np.lexsort(keys)


def _codes(simplices: np.ndarray, n: int) -> np.ndarray:
    # positional encoding in base n; exact while n ** (d + 1) fits in int64
    out = np.zeros(len(simplices), dtype=np.int64)
    for i in range(simplices.shape[1]):
        out = out * n + simplices[:, i]
    return out


def _boundary_rows(cofaces: np.ndarray, rank_of_code, n: int) -> np.ndarray:
    k = cofaces.shape[1]
    cols = []
    for drop in range(k):
        face = np.delete(cofaces, drop, axis=1)
        cols.append(rank_of_code(_codes(face, n)))
    return np.sort(np.column_stack(cols), axis=1) if cols else np.zeros((0, k), dtype=np.int64)


def persistence(cx: FiltrationComplex, max_homology_dim: int = 1) -> PersistenceDiagram:
    """Persistence diagram in dimensions ``0..max_homology_dim``.

    Zero-persistence pairs are dropped. Values are multiplied by ``cx.scale``.
    """
    if max_homology_dim < 0:
        raise ValueError("max_homology_dim must be non-negative")
    if max_homology_dim >= cx.max_dim:
        raise ValueError(f"max_homology_dim={max_homology_dim} needs simplices up to dimension "
                         f"{max_homology_dim + 1}; rebuild the complex with max_dim >= {max_homology_dim + 1}")
    n = cx.n_vertices
    if n == 0:
        return PersistenceDiagram([], [], [], cx.scale)
    if float(n) ** (max_homology_dim + 2) > 2.0 ** 62:
        raise ValueError("too many vertices for the simplex encoding")
    S = [np.asarray(s, dtype=np.int64) for s in cx.simplices[: max_homology_dim + 2]]
    V = [np.asarray(v, dtype=float) for v in cx.values[: max_homology_dim + 2]]
    for d in range(len(S)):
        o = _order(S[d], V[d])
        S[d], V[d] = S[d][o], V[d][o]

    E = S[1]
    if len(E):
        g = coo_matrix((np.ones(len(E)), (E[:, 0], E[:, 1])), shape=(n, n))
        n_comp = connected_components(g, directed=False)[0]
    else:
        n_comp = n
    complete = len(E) == n * (n - 1) // 2

    dims, births, deaths = [], [], []
    negative = np.zeros(len(S[0]), dtype=bool)
    for d in range(max_homology_dim + 1):
        rows, cols = S[d], S[d + 1]
        codes = _codes(rows, n)
        sorter = np.argsort(codes)

        def rank_of_code(c, codes=codes, sorter=sorter):
            return sorter[np.searchsorted(codes, c, sorter=sorter)]

        faces = _boundary_rows(cols, rank_of_code, n) if len(cols) else np.zeros((0, d + 2), dtype=np.int64)
        positive = int((~negative).sum())
        # early exit is exact once every positive row that can die has died
        if d == 0:
            target = positive - n_comp
        elif complete:
            # the last complex is a full simplex skeleton: no essential class in dim d
            target = positive
        else:
            target = -1
        piv = _reduce(np.ascontiguousarray(faces), len(rows), int(target))
        paired = np.zeros(len(rows), dtype=bool)
        for j in np.flatnonzero(piv >= 0):
            i = piv[j]
            paired[i] = True
            b, x = V[d][i], V[d + 1][j]
            if x > b:
                dims.append(d)
                births.append(b * cx.scale)
                deaths.append(x * cx.scale)
        for i in np.flatnonzero(~negative & ~paired):
            dims.append(d)
            births.append(V[d][i] * cx.scale)
            deaths.append(math.inf)
        negative = piv >= 0
    return PersistenceDiagram(dims, births, deaths, cx.scale)
