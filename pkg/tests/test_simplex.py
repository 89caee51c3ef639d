import numpy as np
import pytest
from scipy.optimize import linprog as scipy_linprog

from boxfilt.simplex import LPInfeasible, SimplexIterationLimit, linprog


def test_textbook_maximisation():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
    x, obj = linprog([-3, -5], A_le=[[1, 0], [0, 2], [3, 2]], b_le=[4, 12, 18])
    assert obj == pytest.approx(-36.0)
    assert np.allclose(x, [2, 6])


def test_ge_rows_need_phase_one():
    # min x + y s.t. x + 2y >= 4, 3x + y >= 6
    x, obj = linprog([1, 1], A_ge=[[1, 2], [3, 1]], b_ge=[4, 6])
    assert obj == pytest.approx(2.8)
    assert np.allclose(x, [1.6, 1.2])


def test_negative_rhs_is_normalised():
    # -x <= -2 is x >= 2
    x, obj = linprog([1], A_le=[[-1]], b_le=[-2])
    assert obj == pytest.approx(2.0)


def test_infeasible():
    with pytest.raises(LPInfeasible):
        linprog([1], A_ge=[[1]], b_ge=[5], A_le=[[1]], b_le=[3])


def test_unbounded():
    with pytest.raises(RuntimeError, match="unbounded"):
        linprog([-1, 0], A_le=[[0, 1]], b_le=[1])


def test_iteration_limit_names_the_limit():
    with pytest.raises(SimplexIterationLimit, match="max_simplex_iterations=1"):
        linprog([-3, -5], A_le=[[1, 0], [0, 2], [3, 2]], b_le=[4, 12, 18], max_iter=1)


def test_no_constraints():
    x, obj = linprog([1.0, 2.0])
    assert obj == 0.0 and np.all(x == 0)


def test_matches_highs_on_random_feasible_programs():
    rng = np.random.default_rng(3)
    for _ in range(150):
        nv, m_le, m_ge = rng.integers(1, 6), rng.integers(1, 6), rng.integers(0, 4)
        x0 = rng.uniform(0, 2, nv)
        A_le = rng.uniform(0.1, 2, (m_le, nv))
        b_le = A_le @ x0 + rng.uniform(0, 1, m_le)
        A_ge = rng.uniform(-1, 2, (m_ge, nv))
        b_ge = A_ge @ x0 - rng.uniform(0, 1, m_ge)
        c = rng.normal(size=nv)
        x, obj = linprog(c, A_ge=A_ge if m_ge else None, b_ge=b_ge if m_ge else None,
                         A_le=A_le, b_le=b_le)
        ref = scipy_linprog(c, A_ub=np.vstack([A_le, -A_ge]), b_ub=np.concatenate([b_le, -b_ge]),
                            bounds=[(0, None)] * nv, method="highs")
        assert ref.status == 0
        assert obj == pytest.approx(ref.fun, abs=1e-8)
        assert np.all(A_le @ x <= b_le + 1e-8)
        if m_ge:
            assert np.all(A_ge @ x >= b_ge - 1e-8)


def test_deterministic():
    args = dict(c=[-1, -1, -1], A_le=[[1, 1, 0], [0, 1, 1], [1, 0, 1]], b_le=[1, 1, 1])
    a, b = linprog(**args), linprog(**args)
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]
