"""Dense two-phase primal simplex with Bland's rule.

Small and slow on purpose: it is the reference the fast expansion solver is
checked against, and it handles the extra total-width constraint used by the
binary search.
"""

from __future__ import annotations

import numpy as np


class LPInfeasible(Exception):
    """The constraint set is empty."""


class SimplexIterationLimit(RuntimeError):
    def __init__(self, limit: int):
        super().__init__(f"simplex exceeded max_simplex_iterations={limit}")
        self.limit = limit


def _pivot(T: np.ndarray, basis: list, row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])
    basis[row] = col


def _run(T, basis, n_cols, tol, budget):
    """Minimize the objective held in the last row over the first ``n_cols`` columns."""
    m = T.shape[0] - 1
    steps = 0
    while True:
        reduced = T[-1, :n_cols]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return steps
        col = int(entering[0])
        column = T[:m, col]
        positive = np.flatnonzero(column > tol)
        if positive.size == 0:
            raise RuntimeError("LP is unbounded")
        ratios = T[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        if steps >= budget:
            raise SimplexIterationLimit(budget)
        _pivot(T, basis, row, col)
        steps += 1


def linprog(c, A_ge=None, b_ge=None, A_le=None, b_le=None, max_iter=None, tol=1e-9):
    """Solve ``min c @ x`` s.t. ``A_ge @ x >= b_ge``, ``A_le @ x <= b_le``, ``x >= 0``.

    Returns ``(x, objective_value)``. ``max_iter`` defaults to
    ``10 * (n_variables + n_constraints)`` pivots over both phases.
    """
    c = np.asarray(c, dtype=float)
    nv = c.size
    rows, rhs, senses = [], [], []
    for A, b, sense in ((A_ge, b_ge, 1), (A_le, b_le, -1)):
        if A is None:
            continue
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        for a_row, b_val in zip(A, b):
            # normalise to a non-negative right-hand side
            if b_val < 0:
                a_row, b_val, s = -a_row, -b_val, -sense
            else:
                s = sense
            rows.append(a_row)
            rhs.append(b_val)
            senses.append(s)
    m = len(rows)
    if max_iter is None:
        max_iter = 10 * (nv + m)
    if m == 0:
        if np.any(c < -tol):
            raise RuntimeError("LP is unbounded")
        return np.zeros(nv), 0.0

    n_ge = sum(1 for s in senses if s == 1)
    n_slack = m
    n_art = n_ge
    n_cols = nv + n_slack + n_art
    T = np.zeros((m + 1, n_cols + 1))
    basis = [0] * m
    art = nv + n_slack
    for i, (a_row, b_val, s) in enumerate(zip(rows, rhs, senses)):
        T[i, :nv] = a_row
        T[i, -1] = b_val
        if s == -1:
            T[i, nv + i] = 1.0
            basis[i] = nv + i
        else:
            T[i, nv + i] = -1.0
            T[i, art] = 1.0
            basis[i] = art
            art += 1

    budget = max_iter
    if n_art:
        # phase I: minimise the sum of artificials
        T[-1, :] = 0.0
        for i in range(m):
            if basis[i] >= nv + n_slack:
                T[-1, :] -= T[i, :]
        for j in range(nv + n_slack, n_cols):
            T[-1, j] = 0.0
        budget -= _run(T, basis, n_cols, tol, budget)
        if -T[-1, -1] > tol * max(1.0, float(np.max(np.abs(rhs)))):
            raise LPInfeasible("constraints are infeasible")
        # drive zero-level artificials out of the basis
        for i in range(m):
            if basis[i] >= nv + n_slack:
                candidates = np.flatnonzero(np.abs(T[i, : nv + n_slack]) > tol)
                if candidates.size:
                    _pivot(T, basis, i, int(candidates[0]))
        T[:, nv + n_slack : n_cols] = 0.0

    # phase II
    T[-1, :] = 0.0
    T[-1, :nv] = c
    for i in range(m):
        if basis[i] < nv + n_slack and basis[i] < nv and c[basis[i]] != 0.0:
            T[-1, :] -= c[basis[i]] * T[i, :]
    _run(T, basis, nv + n_slack, tol, budget)
    x = np.zeros(n_cols)
    for i in range(m):
        x[basis[i]] = T[i, -1]
    sol = x[:nv]
    return sol, float(c @ sol)
