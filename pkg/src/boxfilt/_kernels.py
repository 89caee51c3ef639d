"""Compiled kernels for the box-expansion objective.

The expansion LP is solved in *offset* coordinates ``z``: for an input box with
faces ``l, u`` the candidate is ``[l - z[:n], u + z[n:]]`` with
``0 <= z <= zmax``. For site ``s`` the coverage penalty is

    max(-cap, max_k (R[s, k] - z[k]))

where ``R[s, i] = l_i - x_i`` and ``R[s, n + i] = x_i - u_i``. The objective is

    alpha * sum_s theta[s] * penalty_s(z) + (1 - alpha) * sum(z)

plus a constant (the input box width). It is convex and piecewise linear and
every piece has slope 0 or -1 in a single coordinate, so the directional
derivative is linear on the cells cut out by ``d_j = d_k`` and ``d_k = 0``.
The vertices of those cells inside the unit cube lie in ``{-1, 0, 1}^K``, hence
a point is optimal iff no direction in that finite set descends, and the
optimal set is walked to its smallest/largest element along ``{0, -1}^K`` and
``{0, 1}^K`` directions.
"""

import itertools

import numpy as np
from numba import njit

# status codes returned by the kernels
OK = 0
ITERATION_LIMIT = 1


def direction_table(k: int) -> np.ndarray:
    """All non-zero vectors of ``{-1, 0, 1}^k`` in a fixed order."""
    rows = [d for d in itertools.product((0, 1, -1), repeat=k) if any(d)]
    return np.array(rows, dtype=np.float64)


@njit(cache=True)
def objective(R, theta, cap, alpha, z):
    tot = 0.0
    for s in range(R.shape[0]):
        v = -cap
        for k in range(R.shape[1]):
            val = R[s, k] - z[k]
            if val > v:
                v = val
        tot += theta[s] * v
    return alpha * tot + (1.0 - alpha) * np.sum(z)


@njit(cache=True)
def penalties(R, cap, z):
    out = np.empty(R.shape[0])
    for s in range(R.shape[0]):
        v = -cap
        for k in range(R.shape[1]):
            val = R[s, k] - z[k]
            if val > v:
                v = val
        out[s] = v
    return out


@njit(cache=True)
def _active(R, cap, z, tol):
    # active[s, k] for the affine pieces, active[s, K] for the constant piece
    S, K = R.shape
    act = np.zeros((S, K + 1), dtype=np.bool_)
    for s in range(S):
        v = -cap
        for k in range(K):
            val = R[s, k] - z[k]
            if val > v:
                v = val
        for k in range(K):
            if R[s, k] - z[k] >= v - tol:
                act[s, k] = True
        if -cap >= v - tol:
            act[s, K] = True
    return act


@njit(cache=True)
def _slope(act, theta, alpha, d):
    S = act.shape[0]
    K = act.shape[1] - 1
    acc = 0.0
    for s in range(S):
        best = -2.0
        if act[s, K]:
            best = 0.0
        for k in range(K):
            if act[s, k] and -d[k] > best:
                best = -d[k]
        acc += theta[s] * best
    return alpha * acc + (1.0 - alpha) * np.sum(d)


@njit(cache=True)
def _feasible(z, zmax, d, tol):
    for k in range(z.size):
        if d[k] > 0 and z[k] >= zmax[k] - tol:
            return False
        if d[k] < 0 and z[k] <= tol:
            return False
    return True


@njit(cache=True)
def _line_search(R, theta, cap, alpha, z, d, zmax, tol_v, tol_g, flat):
    """Step length along ``d``.

    Descent mode stops at the first breakpoint where the right slope is no
    longer negative; flat mode stops where it becomes positive.
    """
    S, K = R.shape
    tmax = np.inf
    for k in range(K):
        if d[k] > 0:
            tmax = min(tmax, zmax[k] - z[k])
        elif d[k] < 0:
            tmax = min(tmax, z[k])
    buf = np.empty(S * (K * (K - 1) // 2 + K) + 1)
    nb = 0
    for s in range(S):
        for k in range(K):
            dk = R[s, k] - z[k]
            for j in range(k + 1, K):
                if d[k] != d[j]:
                    t = (dk - (R[s, j] - z[j])) / (d[k] - d[j])
                    if t > tol_v and t < tmax:
                        buf[nb] = t
                        nb += 1
            if d[k] != 0:
                t = (dk + cap) / d[k]
                if t > tol_v and t < tmax:
                    buf[nb] = t
                    nb += 1
    buf[nb] = tmax
    nb += 1
    cand = np.sort(buf[:nb])
    lo = 0
    hi = nb - 1
    # first candidate satisfying the stop predicate; the last one (tmax) always stops
    while lo < hi:
        mid = (lo + hi) // 2
        zt = z + cand[mid] * d
        g = _slope(_active(R, cap, zt, tol_v), theta, alpha, d)
        stop = g > tol_g if flat else g >= -tol_g
        if stop:
            hi = mid
        else:
            lo = mid + 1
    return cand[lo]


@njit(cache=True)
def _clip(z, zmax, tol):
    for k in range(z.size):
        if z[k] < tol:
            z[k] = 0.0
        elif z[k] > zmax[k] - tol:
            z[k] = zmax[k]


@njit(cache=True)
def descend(R, theta, cap, alpha, zmax, z0, dirs, tol_v, tol_g, max_iter):
    """Minimize the objective from ``z0``; returns ``(z, status, iterations)``.

    Each iteration line-searches every descending direction and takes the one
    with the largest decrease. Following the steepest slope alone can zigzag
    across a ridge with vanishing steps.
    """
    z = z0.copy()
    _clip(z, zmax, tol_v)
    for it in range(max_iter):
        act = _active(R, cap, z, tol_v)
        f0 = objective(R, theta, cap, alpha, z)
        best = -1
        best_g = -tol_g
        best_dec = 0.0
        best_t = 0.0
        for i in range(dirs.shape[0]):
            d = dirs[i]
            if not _feasible(z, zmax, d, tol_v):
                continue
            g = _slope(act, theta, alpha, d)
            if g >= -tol_g:
                continue
            t = _line_search(R, theta, cap, alpha, z, d, zmax, tol_v, tol_g, False)
            dec = f0 - objective(R, theta, cap, alpha, z + t * d)
            if best < 0 or dec > best_dec or (dec == best_dec and g < best_g):
                best, best_g, best_dec, best_t = i, g, dec, t
        if best < 0:
            return z, OK, it
        z = z + best_t * dirs[best]
        _clip(z, zmax, tol_v)
    return z, ITERATION_LIMIT, max_iter


@njit(cache=True)
def flat_walk(R, theta, cap, alpha, zmax, z0, dirs, sign, tol_v, tol_g, max_iter):
    """Move through the optimal set along ``{0, sign}^K`` directions of zero slope.

    Starting from an optimum this ends at the componentwise largest
    (``sign = 1``) or smallest (``sign = -1``) optimal offset vector.
    """
    z = z0.copy()
    K = z.size
    for it in range(max_iter):
        act = _active(R, cap, z, tol_v)
        best = -1
        best_nnz = 0
        for i in range(dirs.shape[0]):
            d = dirs[i]
            ok = True
            nnz = 0
            for k in range(K):
                if d[k] != 0:
                    if d[k] != sign:
                        ok = False
                        break
                    nnz += 1
            if not ok or not _feasible(z, zmax, d, tol_v):
                continue
            if _slope(act, theta, alpha, d) <= tol_g and nnz > best_nnz:
                best_nnz = nnz
                best = i
        if best < 0:
            return z, OK, it
        d = dirs[best]
        t = _line_search(R, theta, cap, alpha, z, d, zmax, tol_v, tol_g, True)
        z = z + t * d
        _clip(z, zmax, tol_v)
    return z, ITERATION_LIMIT, max_iter
