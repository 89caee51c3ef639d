"""Acceptance criteria 1-13 at their stated tolerances.

Each ``criterion_N`` returns ``(ok, detail)``. Under pytest every criterion is
one test and the verdicts are printed in a summary section; run this file
directly to print the same lines without pytest.

Pinned choices (seeds, reduced sizes, pi) are listed next to each criterion.
"""

from __future__ import annotations

import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from boxfilt.baselines import dtm_filtration, vr_filtration  # noqa: E402
from boxfilt.complex import flag_complex, persistence  # noqa: E402
from boxfilt.datasets import (add_gaussian_noise, gen_circle_with_cluster, gen_concentric,  # noqa: E402
                              gen_noisy_circle, gen_noisy_ellipse)
from boxfilt.expansion import (ExpansionProblem, SolverConfig, largest_optimal_expansion,  # noqa: E402
                               objective_cost, optimal_box_range, solve_expansion_lp,
                               verify_facet_bounds)
from boxfilt.filtration import box_filtration, check_helly  # noqa: E402
from boxfilt.geometry import Box, RoundingKind, box_intersection, box_union, round_box  # noqa: E402
from boxfilt.mapper import box_mapper  # noqa: E402
from boxfilt.metrics import (bottleneck_distance, classical_mds, distance_matrix, kmeans,  # noqa: E402
                             rand_score)

from corpus import ALPHAS, grid_problem, pixel_problem, point_problem, tie_problem  # noqa: E402
from oracles import betti_from_diagram, betti_numbers, exhaustive_bottleneck, grid_min_bnb  # noqa: E402

SIMPLEX = SolverConfig(backend="simplex")

# reduced experiment clouds, as listed in criterion 7
REDUCED = {
    "circle": lambda seed: gen_noisy_circle(60, 30, seed=seed),
    "ellipse": lambda seed: gen_noisy_ellipse(60, 30, seed=seed),
    "cluster": lambda seed: gen_circle_with_cluster(45, 60, seed=seed),
    "concentric": lambda seed: gen_concentric(60, 45, 12, seed=seed),
}
PI = 5.0          # growth step on the scale-100 clouds
ELLIPSE_SEED = 0  # criterion 10
CLUSTER_SEED = 0  # criterion 11: base seed of the 12 clouds; noise uses CLUSTER_SEED + 1
CLUSTER_PI = 5.0  # criterion 11
NOISE_LEVELS = (0.0, 2.0, 5.0)


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def with_alpha(p: ExpansionProblem, alpha: float) -> ExpansionProblem:
    return ExpansionProblem(p.pivot, alpha, p.pi, p.neighborhood, p.sites, p.counts, p.site_ids)


# --- 1 ----------------------------------------------------------------------

def criterion_1():
    """LP cost vs brute-force grid minimum, 200 instances, 1e-2 absolute, < 60 s."""
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst, below = 0.0, 0
    for _ in range(200):
        p, pitch = grid_problem(rng)
        cost = solve_expansion_lp(p).cost
        # candidate faces: every lattice value between the pivot and the neighborhood boundary
        z_lo = p.pivot.lower - pitch * np.floor((p.pivot.lower - p.neighborhood.lower) / pitch)
        z_hi = p.pivot.upper + pitch * np.floor((p.neighborhood.upper - p.pivot.upper) / pitch)
        g = grid_min_bnb(p.pivot.lower, p.pivot.upper, z_lo, z_hi, p.sites, p.counts, p.alpha, pitch)
        worst = max(worst, abs(cost - g))
        below += cost <= g + 1e-9
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-2 and below == 200 and elapsed < 60
    return ok, f"max |lp - grid| = {worst:.2e}, lp <= grid on {below}/200, {elapsed:.1f} s"


# --- 2 ----------------------------------------------------------------------

def criterion_2():
    """The two-point line X = {0, 10}, pi = 10.5."""
    def line(alpha):
        return ExpansionProblem.for_points(Box([0.0], [0.0]), [[0.0], [10.0]], alpha, 10.5)

    eps = SolverConfig().binary_search_epsilon
    checks = []
    for cfg in (None, SIMPLEX):
        c5 = solve_expansion_lp(line(0.5), cfg).cost
        big5 = largest_optimal_expansion(line(0.5), cfg).box
        big4 = largest_optimal_expansion(line(0.4), cfg).box
        sol6 = largest_optimal_expansion(line(0.6), cfg)
        checks += [
            abs(c5 - 5.0) <= 1e-9,
            abs(big5.lower[0]) <= eps and abs(big5.upper[0] - 10) <= eps,
            big4 == Box([0.0], [0.0]),
            abs(sol6.box.lower[0]) <= eps and abs(sol6.box.upper[0] - 10) <= eps,
            abs(objective_cost(sol6.box, line(0.6)) - 4.0) <= 1e-9,
        ]
    return all(checks), f"{sum(checks)}/{len(checks)} checks over both backends"


# --- 3 ----------------------------------------------------------------------

def criterion_3():
    """Union and intersection of verified-optimal boxes stay optimal (tie corpus)."""
    rng = np.random.default_rng(103)
    pairs = fails = families = 0
    for _ in range(150):
        p = tie_problem(rng)
        best = solve_expansion_lp(p).cost
        boxes = []
        for _ in range(6):
            start = rng.uniform(0, 1, 2 * p.dim) * p.max_offsets
            boxes.extend(optimal_box_range(p, start=start))
        boxes = [b for b in boxes if rel_close(objective_cost(b, p), best, 1e-6)]
        families += len({(tuple(b.lower), tuple(b.upper)) for b in boxes}) > 1
        for a, b in itertools.combinations(boxes, 2):
            pairs += 1
            for c in (box_union(a, b), box_intersection(a, b)):
                fails += not rel_close(objective_cost(c, p), best, 1e-6)
    return fails == 0, f"{pairs} pairs, {families}/150 instances with several optima, {fails} failures"


# --- 4 ----------------------------------------------------------------------

def criterion_4():
    """alpha- and pi-monotonicity of the largest optimal expansion, 200 instances each."""
    rng = np.random.default_rng(104)
    a_fail = p_fail = 0
    for _ in range(200):
        base = point_problem(rng)
        a1, a2 = sorted(rng.choice(np.linspace(0, 1, 11), 2, replace=False))
        small = largest_optimal_expansion(with_alpha(base, float(a1))).box
        large = largest_optimal_expansion(with_alpha(base, float(a2))).box
        a_fail += not large.contains_box(small)
    for _ in range(200):
        base = point_problem(rng)
        pts = rng.uniform(-8, 8, (int(rng.integers(1, 13)), base.dim))
        pi1 = float(rng.uniform(0.5, 4))
        pi2 = pi1 + float(rng.uniform(0.1, 4))
        small = largest_optimal_expansion(ExpansionProblem.for_points(base.pivot, pts, base.alpha, pi1)).box
        large = largest_optimal_expansion(ExpansionProblem.for_points(base.pivot, pts, base.alpha, pi2)).box
        p_fail += not large.contains_box(small)
    return a_fail == 0 and p_fail == 0, f"alpha failures {a_fail}/200, pi failures {p_fail}/200"


# --- 5 ----------------------------------------------------------------------

def criterion_5():
    """Psi1/Psi2/Psi3 roundings of the optimum keep the optimal cost (pixel corpus, H = 1)."""
    rng = np.random.default_rng(105)
    fails = 0
    for _ in range(100):
        p, origin = pixel_problem(rng)
        sol = solve_expansion_lp(p)
        for kind in RoundingKind:
            r = round_box(sol.box, kind, 1.0, origin=origin)
            fails += not rel_close(objective_cost(r, p), sol.cost, 1e-6)
    return fails == 0, f"{fails} failures in 300 roundings"


# --- 6 ----------------------------------------------------------------------

def criterion_6():
    """Facet bounds hold for every largest optimum with M != V across the corpus."""
    rng = np.random.default_rng(106)
    cfg = SolverConfig(binary_search_epsilon=1e-6)
    corpus = ([point_problem(rng) for _ in range(200)] + [grid_problem(rng)[0] for _ in range(100)]
              + [tie_problem(rng) for _ in range(100)])
    checked = fails = 0
    for p in corpus:
        M = largest_optimal_expansion(p, cfg).box
        rep = verify_facet_bounds(p, M)
        if M != p.pivot and rep.applicable:
            checked += 1
            fails += not rep.holds
    return fails == 0 and checked > 0, f"{checked} applicable instances, {fails} violations"


# --- 7 ----------------------------------------------------------------------

def _nerve_ok(seq, cx):
    """Independent replay: each edge enters exactly at the first step its boxes meet."""
    lo, hi = seq.lower, seq.upper
    n = seq.n_pivots
    edges = cx.edge_values()
    for a in range(n):
        for b in range(a + 1, n):
            meet = np.all(np.maximum(lo[a], lo[b]) <= np.minimum(hi[a], hi[b]), axis=1)
            steps = np.flatnonzero(meet)
            if (a, b) in edges:
                if not len(steps) or steps[0] != edges[(a, b)] or not meet[steps[0]:].all():
                    return False
            elif len(steps):
                return False
    seen = {}
    for s, v in cx.items():
        for k in range(len(s)):
            face = s[:k] + s[k + 1:]
            if face and seen[face] > v:
                return False
        seen[s] = v
    return check_helly(seq, cx)


def criterion_7():
    """Cover and nerve monotonicity on the four reduced clouds, < 10 min."""
    t0 = time.perf_counter()
    bad = []
    runs = 0
    for name, gen in REDUCED.items():
        pts = gen(0)
        for alpha in (0.1, 0.5, 0.9):
            seq, cx, _ = box_filtration(pts, alpha, PI)
            runs += 1
            if not seq.is_monotone() or not _nerve_ok(seq, cx):
                bad.append(f"{name}@{alpha}")
    elapsed = time.perf_counter() - t0
    return not bad and elapsed < 600, f"{runs} runs, failures {bad or 'none'}, {elapsed:.0f} s"


# --- 8 ----------------------------------------------------------------------

def criterion_8():
    """Reduction equals the Z/2 rank oracle on complexes of <= 30 simplices; ring has one loop."""
    rng = np.random.default_rng(108)
    tested = fails = 0
    while tested < 300:
        n = int(rng.integers(1, 7))
        pairs = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.6]
        vals = rng.integers(0, 5, len(pairs))
        cx = flag_complex(n, pairs, vals, 2)
        if len(cx) > 30:
            continue
        tested += 1
        dgm = persistence(cx, 1)
        for t in range(5):
            betti = betti_numbers([s for s, v in cx.items() if v <= t], 1)
            fails += any(betti_from_diagram(dgm.pairs(d), t) != betti[d] for d in range(2))
    ring = flag_complex(4, [(0, 2), (0, 3), (1, 2), (1, 3)], [1, 1, 1, 1], 2)
    loops = len(persistence(ring).pairs(1))
    return fails == 0 and loops == 1, f"{tested} complexes, {fails} mismatches, ring H1 classes = {loops}"


# --- 9 ----------------------------------------------------------------------

def _diagram(rng, size):
    b = rng.uniform(0, 5, size)
    return np.column_stack([b, b + rng.uniform(0, 3, size)])


def criterion_9():
    """Bottleneck symmetry, triangle inequality (500 triples), exhaustive agreement (<= 5 points)."""
    rng = np.random.default_rng(109)
    worst = 0.0
    for _ in range(500):
        A, B, C = (_diagram(rng, int(rng.integers(0, 8))) for _ in range(3))
        ab, ba = bottleneck_distance(A, B), bottleneck_distance(B, A)
        tri = bottleneck_distance(A, C) - ab - bottleneck_distance(B, C)
        worst = max(worst, abs(ab - ba), tri)
    mism = 0
    for _ in range(300):
        A, B = _diagram(rng, int(rng.integers(0, 6))), _diagram(rng, int(rng.integers(0, 6)))
        mism += abs(bottleneck_distance(A, B) - exhaustive_bottleneck(A, B)) > 1e-9
    return worst <= 1e-9 and mism == 0, f"worst violation {worst:.1e}, {mism}/300 disagree with exhaustive"


# --- 10 ---------------------------------------------------------------------

def h1_gap(dgm) -> float:
    """Top H1 lifetime over the second; one class gives inf, none gives 0.

    Essential classes count, with infinite lifetime.
    """
    pairs = dgm.pairs(1)
    life = np.sort(pairs[:, 1] - pairs[:, 0])[::-1]
    if len(life) == 0:
        return 0.0
    if len(life) == 1 or life[1] == 0:
        return math.inf
    if math.isinf(life[0]) and math.isinf(life[1]):
        return 1.0
    return float(life[0] / life[1])


def criterion_10():
    """Reduced noisy ellipse: BF gap >= 2 at alpha 0.5 and BF gap > VR gap for >= 4 alphas."""
    pts = REDUCED["ellipse"](ELLIPSE_SEED)
    vr = h1_gap(persistence(vr_filtration(pts)))
    gaps = {a: h1_gap(box_filtration(pts, a, PI)[2]) for a in ALPHAS[1:]}
    wins = sum(g > vr for g in gaps.values())
    ok = gaps[0.5] >= 2.0 and wins >= 4
    shown = ", ".join(f"{a:g}:{g:.2f}" for a, g in gaps.items())
    return ok, f"VR gap {vr:.2f}; BF gaps {shown}; BF wins {wins}/8"


# --- 11 ---------------------------------------------------------------------

def clustering_clouds(seed=CLUSTER_SEED):
    clouds, labels = [], []
    for c, gen in enumerate(REDUCED.values()):
        for sigma in NOISE_LEVELS:
            clouds.append(add_gaussian_noise(gen(seed), sigma, seed=seed + 1))
            labels.append(c)
    return clouds, labels


def _summed_score(diagrams_per_param, labels):
    D = sum(distance_matrix(dgms) for dgms in diagrams_per_param)
    if not np.all(np.isfinite(D)):
        return None
    return rand_score(labels, kmeans(classical_mds(D, 2), 4, seed=0))


def criterion_11():
    """Clustering the 12 reduced clouds: BF Rand >= 0.85 and BF Rand >= DTM Rand, < 30 min."""
    t0 = time.perf_counter()
    clouds, labels = clustering_clouds()
    bf = _summed_score([[box_filtration(P, a, CLUSTER_PI)[2] for P in clouds] for a in ALPHAS], labels)
    dtm = _summed_score([[persistence(dtm_filtration(P, m), 1) for P in clouds] for m in ALPHAS], labels)
    elapsed = time.perf_counter() - t0
    if bf is None or dtm is None:
        return False, f"infinite summed distance (bf={bf}, dtm={dtm}), {elapsed:.0f} s"
    ok = bf >= 0.85 and bf >= dtm and elapsed < 1800
    return ok, f"BF Rand {bf:.4f}, DTM Rand {dtm:.4f}, {elapsed:.0f} s"


# --- 12 ---------------------------------------------------------------------

def criterion_12():
    """Stability smoke on the reduced noisy circle: distances shrink with the perturbation."""
    pts = REDUCED["circle"](0)
    base = box_filtration(pts, 0.5, PI)[2]
    eps_grid = (5.0, 2.0, 0.5)
    means, skipped, infinite = [], 0, 0
    for eps in eps_grid:
        ds = []
        for seed in range(5):
            noisy = pts + np.random.default_rng(seed).uniform(-eps, eps, pts.shape)
            dgm = box_filtration(noisy, 0.5, PI)[2]
            d = bottleneck_distance(base, dgm, 1)
            if len(dgm.essential(1)) != len(base.essential(1)):
                skipped += 1
                continue
            infinite += math.isinf(d)
            ds.append(d)
        means.append(float(np.mean(ds)) if ds else math.nan)
    shrink = all(means[i + 1] <= 1.2 * means[i] for i in range(len(means) - 1))
    ok = infinite == 0 and not any(math.isnan(m) for m in means) and shrink
    shown = ", ".join(f"eps {e:g}: {m:.2f}" for e, m in zip(eps_grid, means))
    return ok, f"mean H1 bottleneck {shown}; {skipped} runs with unmatched essentials"


# --- 13 ---------------------------------------------------------------------

def criterion_13():
    """Mapper ring: reduced noisy circle, k = 8, alpha = 0.1, pi = width / 10, cycle rank 1."""
    pts = REDUCED["circle"](0)
    g = box_mapper(pts, 8, float(np.ptp(pts[:, 0])) / 10, 0.1, seed=0)
    rank = g.cycle_rank()
    return rank == 1, f"cycle rank {rank} ({g.n_nodes} nodes, {len(g.edges)} edges)"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 14)}


def verdict(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.slow
@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    from conftest import ACCEPTANCE

    ok, detail = CRITERIA[n]()
    line = verdict(n, ok, detail)
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    for n, fn in CRITERIA.items():
        print(verdict(n, *fn()), flush=True)
