"""Box expansion linear programs and the largest / k-optimal expansion steps."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .geometry import Box, PixelGrid, box_union, neighborhood, pixel_weights, point_weights
from .simplex import LPInfeasible, SimplexIterationLimit, linprog

__all__ = [
    "SolverConfig",
    "ExpansionProblem",
    "ExpansionSolution",
    "FacetBoundReport",
    "InfeasibleExpansion",
    "ExpansionIterationLimit",
    "objective_cost",
    "solve_expansion_lp",
    "largest_optimal_expansion",
    "k_optimal_expansion",
    "verify_facet_bounds",
]

# the descent solver enumerates 3^(2n) directions; beyond this use the simplex
_MAX_DESCENT_DIM = 4


class InfeasibleExpansion(ValueError):
    """No box satisfies the expansion constraints (e.g. the width demand is too large)."""


class ExpansionIterationLimit(RuntimeError):
    """An LP solver hit its iteration limit."""


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs for the expansion solvers.

    ``cost_tolerance`` is relative: two costs are equal when they differ by at
    most ``cost_tolerance * (1 + |C*|)``. ``backend`` is ``"descent"`` (exact
    piecewise-linear descent, the default) or ``"simplex"``.
    """

    cost_tolerance: float = 1e-6
    binary_search_epsilon: float = 0.1
    max_simplex_iterations: int | None = None
    max_descent_iterations: int = 20_000
    backend: str = "descent"

    def __post_init__(self):
        if not self.cost_tolerance > 0 or not self.binary_search_epsilon > 0:
            raise ValueError("tolerances must be strictly positive")
        if self.max_simplex_iterations is not None and self.max_simplex_iterations < 1:
            raise ValueError("max_simplex_iterations must be positive")
        if self.max_descent_iterations < 1:
            raise ValueError("max_descent_iterations must be positive")
        if self.backend not in ("descent", "simplex"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True, eq=False)
class ExpansionProblem:
    """One expansion of ``pivot`` inside the open box ``neighborhood``.

    ``sites`` are the data points (point cover) or occupied pixel centroids
    (pixel cover) strictly inside the neighborhood, with multiplicities
    ``counts`` and identifiers ``site_ids`` into the source cloud or grid.
    Use :meth:`for_points` / :meth:`for_pixels` rather than the raw constructor.
    """

    pivot: Box
    alpha: float
    pi: float
    neighborhood: Box
    sites: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    site_ids: np.ndarray = field(repr=False)
    cover: str = "point"
    pixel_width: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.pi > 0:
            raise ValueError(f"pi must be positive, got {self.pi}")
        if self.cover not in ("point", "pixel"):
            raise ValueError(f"cover must be 'point' or 'pixel', got {self.cover!r}")
        if self.cover == "pixel" and not (self.pixel_width and self.pixel_width > 0):
            raise ValueError("pixel cover needs a positive pixel_width")
        nb, pv = self.neighborhood, self.pivot
        if nb.dim != pv.dim:
            raise ValueError("pivot and neighborhood dimensions differ")
        if not (np.all(nb.lower < pv.lower) and np.all(pv.upper < nb.upper)):
            raise ValueError("the pivot must lie strictly inside its neighborhood")

    @classmethod
    def for_points(cls, pivot: Box, points, alpha: float, pi: float,
                   anchor: Box | None = None, radius: float | None = None) -> "ExpansionProblem":
        """Point-cover problem; the neighborhood is ``B(anchor, radius)``.

        ``anchor`` defaults to the pivot and ``radius`` to ``pi``.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        nb = neighborhood(anchor if anchor is not None else pivot, radius if radius is not None else pi)
        inside = np.flatnonzero(nb.open_contains_points(pts)) if pts.size else np.zeros(0, dtype=int)
        return cls(pivot, float(alpha), float(pi), nb, pts[inside].reshape(-1, pivot.dim),
                   np.ones(inside.size), inside, "point", None)

    @classmethod
    def for_pixels(cls, pivot: Box, grid: PixelGrid, alpha: float, pi: float,
                   anchor: Box | None = None, radius: float | None = None) -> "ExpansionProblem":
        """Pixel-cover problem over the occupied pixels of ``grid``."""
        nb = neighborhood(anchor if anchor is not None else pivot, radius if radius is not None else pi)
        inside = np.flatnonzero(nb.open_contains_points(grid.centroids))
        return cls(pivot, float(alpha), float(pi), nb, grid.centroids[inside],
                   grid.counts[inside].astype(float), inside, "pixel", float(grid.pixel_width))

    @property
    def dim(self) -> int:
        return self.pivot.dim

    @property
    def cap(self) -> float:
        """Upper bound on a site weight: 0 for points, half a pixel for pixels."""
        return 0.0 if self.cover == "point" else 0.5 * self.pixel_width

    @cached_property
    def deficits(self) -> np.ndarray:
        pv = self.pivot
        return np.ascontiguousarray(
            np.hstack([pv.lower - self.sites, self.sites - pv.upper]).reshape(-1, 2 * self.dim)
        )

    @cached_property
    def max_offsets(self) -> np.ndarray:
        return np.concatenate([self.pivot.lower - self.neighborhood.lower,
                               self.neighborhood.upper - self.pivot.upper])

    @cached_property
    def scale(self) -> float:
        vals = [1.0, float(np.max(np.abs(self.neighborhood.lower))),
                float(np.max(np.abs(self.neighborhood.upper)))]
        return max(vals)

    def box_from_offsets(self, z: np.ndarray) -> Box:
        n = self.dim
        lo = self.pivot.lower - z[:n]
        hi = self.pivot.upper + z[n:]
        tol = 1e-10 * self.scale
        # land faces exactly on the coordinates they were solved against
        for i in range(n):
            cands = np.concatenate([self.sites[:, i], [self.pivot.lower[i], self.pivot.upper[i],
                                                       self.neighborhood.lower[i],
                                                       self.neighborhood.upper[i]]])
            lo[i] = _snap_to(lo[i], cands, tol)
            hi[i] = _snap_to(hi[i], cands, tol)
        lo = np.minimum(lo, self.pivot.lower)
        hi = np.maximum(hi, self.pivot.upper)
        return Box(np.maximum(lo, self.neighborhood.lower), np.minimum(hi, self.neighborhood.upper))

    def weights(self, box: Box) -> np.ndarray:
        if self.cover == "point":
            return point_weights(self.sites, box) if len(self.sites) else np.zeros(0)
        return pixel_weights(self.sites, box, self.pixel_width) if len(self.sites) else np.zeros(0)

    def closure_width(self) -> float:
        return self.neighborhood.total_width


def _snap_to(v: float, cands: np.ndarray, tol: float) -> float:
    if cands.size == 0:
        return v
    j = int(np.argmin(np.abs(cands - v)))
    return float(cands[j]) if abs(cands[j] - v) <= tol else v


@dataclass(frozen=True, eq=False)
class ExpansionSolution:
    """An optimal (or, for the width-constrained LP, constrained-optimal) box."""

    box: Box
    cost: float
    weights: dict = field(repr=False)
    is_largest: bool = False
    probes: int = 0


def objective_cost(candidate: Box, problem: ExpansionProblem) -> float:
    """Coverage-versus-width cost of ``candidate`` with tight site weights."""
    tol = 1e-9 * problem.scale
    pv, nb = problem.pivot, problem.neighborhood
    if candidate.dim != pv.dim:
        raise ValueError("candidate dimension does not match the problem")
    if np.any(candidate.lower > pv.lower + tol) or np.any(candidate.upper < pv.upper - tol):
        raise ValueError("candidate must contain the pivot box")
    if np.any(candidate.lower < nb.lower - tol) or np.any(candidate.upper > nb.upper + tol):
        raise ValueError("candidate must lie within the closed neighborhood")
    w = problem.weights(candidate)
    return float(-problem.alpha * np.dot(problem.counts, w)
                 + (1.0 - problem.alpha) * candidate.total_width)


def _solution(problem: ExpansionProblem, box: Box, is_largest=False, probes=0) -> ExpansionSolution:
    w = problem.weights(box)
    return ExpansionSolution(box, objective_cost(box, problem),
                             {int(i): float(v) for i, v in zip(problem.site_ids, w)},
                             is_largest, probes)


@functools.lru_cache(maxsize=None)
def _directions(k: int) -> np.ndarray:
    return _kernels.direction_table(k)


def _descent_range(problem: ExpansionProblem, config: SolverConfig, start=None):
    """Smallest and largest optimal offset vectors, via the exact descent kernels."""
    R = problem.deficits
    theta = np.ascontiguousarray(problem.counts, dtype=float)
    zmax = problem.max_offsets
    k = zmax.size
    dirs = _directions(k)
    tol_v = 1e-10 * problem.scale
    tol_g = 1e-9 * (1.0 + float(theta.sum()))
    z0 = np.zeros(k) if start is None else np.clip(np.asarray(start, dtype=float), 0.0, zmax)
    args = (R, theta, problem.cap, problem.alpha, zmax)
    z, status, _ = _kernels.descend(*args, z0, dirs, tol_v, tol_g, config.max_descent_iterations)
    if status != _kernels.OK:
        raise ExpansionIterationLimit(
            f"descent exceeded max_descent_iterations={config.max_descent_iterations}")
    lo, s1, _ = _kernels.flat_walk(*args, z, dirs, -1.0, tol_v, tol_g, config.max_descent_iterations)
    hi, s2, _ = _kernels.flat_walk(*args, z, dirs, 1.0, tol_v, tol_g, config.max_descent_iterations)
    if s1 != _kernels.OK or s2 != _kernels.OK:
        raise ExpansionIterationLimit(
            f"optimal-set walk exceeded max_descent_iterations={config.max_descent_iterations}")
    return z, lo, hi


def _use_descent(problem: ExpansionProblem, config: SolverConfig) -> bool:
    return config.backend == "descent" and problem.dim <= _MAX_DESCENT_DIM


def _simplex_box(problem: ExpansionProblem, config: SolverConfig, min_total_offset=None) -> Box:
    """Solve the LP in offset variables ``z`` and shifted weights ``s = cap - w >= 0``."""
    R = problem.deficits
    S, K = R.shape
    nv = K + S
    c = np.concatenate([np.full(K, 1.0 - problem.alpha), problem.alpha * problem.counts])
    # s_x + z_k >= R[x, k] + cap, i.e. w_x <= (signed distance to face k)
    A_ge = np.zeros((S * K, nv))
    b_ge = np.zeros(S * K)
    r = 0
    for s in range(S):
        for k in range(K):
            A_ge[r, k] = 1.0
            A_ge[r, K + s] = 1.0
            b_ge[r] = R[s, k] + problem.cap
            r += 1
    if min_total_offset is not None:
        A_ge = np.vstack([A_ge, np.concatenate([np.ones(K), np.zeros(S)])])
        b_ge = np.append(b_ge, min_total_offset)
    A_le = np.hstack([np.eye(K), np.zeros((K, S))])
    b_le = problem.max_offsets
    try:
        x, _ = linprog(c, A_ge, b_ge, A_le, b_le, max_iter=config.max_simplex_iterations)
    except LPInfeasible as exc:
        raise InfeasibleExpansion(str(exc)) from None
    except SimplexIterationLimit as exc:
        raise ExpansionIterationLimit(str(exc)) from None
    return problem.box_from_offsets(np.clip(x[:K], 0.0, problem.max_offsets))


def solve_expansion_lp(problem: ExpansionProblem, config: SolverConfig | None = None,
                       extra_min_width: float | None = None,
                       reference_width: float | None = None) -> ExpansionSolution:
    """Minimize the expansion cost over boxes between the pivot and the closed neighborhood.

    With ``extra_min_width = P`` the total width is additionally forced to be at
    least ``reference_width + P`` (``reference_width`` defaults to the pivot
    width); that variant always runs on the simplex backend. Raises
    :class:`InfeasibleExpansion` when the width demand cannot be met.
    """
    config = config or SolverConfig()
    if extra_min_width is None and _use_descent(problem, config):
        _, lo, _ = _descent_range(problem, config)
        return _solution(problem, problem.box_from_offsets(lo))
    min_offset = None
    if extra_min_width is not None:
        if extra_min_width < 0:
            raise ValueError("extra_min_width must be non-negative")
        ref = problem.pivot.total_width if reference_width is None else reference_width
        min_offset = ref + extra_min_width - problem.pivot.total_width
        if min_offset > float(problem.max_offsets.sum()) + 1e-12 * problem.scale:
            raise InfeasibleExpansion(
                f"total width {ref + extra_min_width:g} does not fit in the neighborhood")
    return _solution(problem, _simplex_box(problem, config, min_offset))


def _binary_search(problem: ExpansionProblem, config: SolverConfig, k: int | None):
    eps = config.binary_search_epsilon
    if _use_descent(problem, config):
        _, lo, hi = _descent_range(problem, config)
        base = problem.box_from_offsets(lo)
        top = problem.box_from_offsets(hi)
        top_gain = top.total_width - base.total_width
        slack = 1e-9 * problem.scale

        def probe(P):
            # every optimum lies inside the largest one, so the width-constrained LP
            # reaches the optimal cost iff the largest optimum is wide enough
            return (top_gain >= P - slack), top
    else:
        base = _simplex_box(problem, config)
        base_cost = objective_cost(base, problem)

        def probe(P):
            try:
                cand = solve_expansion_lp(problem, SolverConfig(**{**config.__dict__, "backend": "simplex"}),
                                          extra_min_width=P, reference_width=base.total_width)
            except InfeasibleExpansion:
                return False, None
            ok = abs(cand.cost - base_cost) <= config.cost_tolerance * (1.0 + abs(base_cost))
            return ok, cand.box

    lower = 0.0 if problem.cover == "point" else float(problem.pixel_width)
    upper = problem.closure_width() - base.total_width
    best = base
    probes = 0
    while upper - lower > eps and (k is None or probes < k):
        P = 0.5 * (lower + upper)
        probes += 1
        accepted, cand = probe(P)
        if accepted:
            best = cand
            lower = P
        else:
            upper = P
    converged = not (upper - lower > eps)
    return _solution(problem, box_union(base, best), is_largest=converged, probes=probes)


def largest_optimal_expansion(problem: ExpansionProblem,
                              config: SolverConfig | None = None) -> ExpansionSolution:
    """Optimal box found by binary search on the extra width ``P``.

    The search starts from the LP optimum ``V*`` and stops once the bracket on
    ``P`` is narrower than ``binary_search_epsilon``; the result contains ``V*``.
    """
    return _binary_search(problem, config or SolverConfig(), None)


def k_optimal_expansion(problem: ExpansionProblem, config: SolverConfig | None = None,
                        k: int = 1) -> ExpansionSolution:
    """Same search as :func:`largest_optimal_expansion` capped at ``k`` probes."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return _binary_search(problem, config or SolverConfig(), int(k))


def optimal_box_range(problem: ExpansionProblem, config: SolverConfig | None = None,
                      start=None) -> tuple[Box, Box, Box]:
    """``(reached, smallest, largest)`` optimal boxes from the descent solver.

    ``reached`` is the optimum the descent lands on from ``start`` (offsets,
    default the pivot itself); useful for producing distinct optima in tests.
    """
    config = config or SolverConfig()
    z, lo, hi = _descent_range(problem, config, start)
    return problem.box_from_offsets(z), problem.box_from_offsets(lo), problem.box_from_offsets(hi)


@dataclass(frozen=True)
class FacetBoundReport:
    applicable: bool
    gamma: float = float("nan")
    p: int = 0
    q: int = 0
    outside: float = 0.0
    on_boundary: float = 0.0
    upper_holds: bool = True
    lower_holds: bool = True
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.upper_holds and self.lower_holds


def verify_facet_bounds(problem: ExpansionProblem, M: Box, tol: float = 1e-9) -> FacetBoundReport:
    """Check the facet-count bounds for a largest optimal box ``M``.

    With ``gamma = 1/alpha - 1``, ``p`` facets of ``M`` not touching the pivot
    and ``q`` facets not lying on the neighborhood boundary, the bounds are
    ``(theta(N minus M) + theta(boundary of M)) / p >= gamma >= theta(N minus M) / q``;
    the boundary term is dropped for pixel covers.
    """
    a = problem.alpha
    if not 0.0 < a < 1.0:
        return FacetBoundReport(False, reason="alpha must lie strictly between 0 and 1")
    V, nb = problem.pivot, problem.neighborhood
    ftol = 1e-9 * problem.scale
    if np.all(np.abs(M.lower - V.lower) <= ftol) and np.all(np.abs(M.upper - V.upper) <= ftol):
        return FacetBoundReport(False, reason="M equals the pivot")
    gamma = 1.0 / a - 1.0
    p = int(np.sum(M.lower < V.lower - ftol) + np.sum(M.upper > V.upper + ftol))
    q = int(np.sum(M.lower > nb.lower + ftol) + np.sum(M.upper < nb.upper - ftol))
    sites = problem.sites
    inside = np.all((sites >= M.lower - ftol) & (sites <= M.upper + ftol), axis=1)
    outside = float(problem.counts[~inside].sum())
    on_face = np.any((np.abs(sites - M.lower) <= ftol) | (np.abs(sites - M.upper) <= ftol), axis=1)
    boundary = float(problem.counts[inside & on_face].sum()) if problem.cover == "point" else 0.0
    upper_ok = (outside + boundary) / p >= gamma - tol if p else True
    if q:
        lower_ok = gamma >= outside / q - tol
    else:
        lower_ok = outside == 0
    return FacetBoundReport(True, gamma, p, q, outside, boundary, bool(upper_ok), bool(lower_ok))
