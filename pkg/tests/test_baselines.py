import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxfilt.baselines import DtmParams, dtm_filtration, dtm_values, vr_filtration
from boxfilt.complex import persistence


def test_two_point_rips():
    cx = vr_filtration([[0, 0], [2, 0]], max_scale=3)
    assert cx.edge_values() == {(0, 1): 2.0}
    assert persistence(cx).pairs(0).tolist() == [[0, 2], [0, math.inf]]


def test_max_scale_cuts_edges():
    cx = vr_filtration([[0, 0], [2, 0]], max_scale=1)
    assert cx.edge_values() == {}
    with pytest.raises(ValueError):
        vr_filtration([[0, 0]], max_scale=0)


def test_equilateral_triangle_has_no_loop():
    pts = [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]
    dgm = persistence(vr_filtration(pts))
    assert len(dgm.pairs(1)) == 0


def test_hexagon_loop():
    t = np.arange(6) * np.pi / 3
    dgm = persistence(vr_filtration(np.column_stack([np.cos(t), np.sin(t)])))
    (b, d), = dgm.pairs(1)
    assert b == pytest.approx(1.0) and d == pytest.approx(math.sqrt(3))


def test_rips_invariant_under_rigid_motion():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, (20, 2))
    th = 0.7
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    a = persistence(vr_filtration(pts))
    b = persistence(vr_filtration(pts @ rot.T + [3.0, -2.0]))
    for d in (0, 1):
        assert np.allclose(a.pairs(d), b.pairs(d), atol=1e-9)


def test_dtm_golden_three_points():
    f = dtm_values([[0.0], [1.0], [10.0]], 0.5)  # k = ceil(1.5) = 2
    assert f == pytest.approx([math.sqrt(50.5), math.sqrt(41.0), math.sqrt(90.5)])
    cx = dtm_filtration([[0.0], [1.0], [10.0]], 0.5)
    assert cx.values[0] == pytest.approx(f)
    assert cx.edge_values()[(0, 1)] == pytest.approx((1 + math.sqrt(50.5) + math.sqrt(41)) / 2)
    # 7.2547 by hand
    assert cx.edge_values()[(0, 1)] == pytest.approx(7.25470, abs=1e-4)


def test_dtm_k1_is_nearest_neighbor_distance():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0], [20.0, 20.0]])
    f = dtm_values(pts, 0.1)
    assert f == pytest.approx([1.0, 1.0, 3.0, math.hypot(20, 17)])
    # the outlier is born last
    dgm = persistence(dtm_filtration(pts, 0.1))
    assert dgm.births.max() == pytest.approx(math.hypot(20, 17))


def test_dtm_coincident_points():
    cx = dtm_filtration([[1.0, 1.0], [1.0, 1.0], [9.0, 9.0]], 0.2)
    assert cx.values[0][:2].tolist() == [0.0, 0.0]
    assert cx.edge_values()[(0, 1)] == 0.0


def test_dtm_params_validation():
    with pytest.raises(ValueError):
        DtmParams(0.0)
    with pytest.raises(ValueError):
        DtmParams(0.5, p=2)
    assert DtmParams(0.1).k(150) == 15
    with pytest.raises(ValueError, match="lower m"):
        dtm_values([[0.0], [1.0]], 0.9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.1, 0.3, 0.5]))
def test_dtm_is_1_lipschitz_in_the_query_point(seed, m):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 10, (15, 2))
    k = DtmParams(m).k(len(pts))

    def dtm_at(q, cloud):
        d = np.sort(np.linalg.norm(cloud - q, axis=1))[:k]
        return math.sqrt(np.mean(d ** 2))

    q = rng.uniform(0, 10, 2)
    step = rng.normal(size=2) * 0.3
    assert abs(dtm_at(q, pts) - dtm_at(q + step, pts)) <= np.linalg.norm(step) + 1e-12
    # the library values agree with the query form (self excluded)
    f = dtm_values(pts, m)
    for i in range(3):
        assert f[i] == pytest.approx(dtm_at(pts[i], np.delete(pts, i, axis=0)))


def test_dtm_edge_values_dominate_vertices():
    rng = np.random.default_rng(1)
    cx = dtm_filtration(rng.uniform(0, 5, (12, 2)), 0.25)
    f = cx.values[0]
    for (a, b), v in cx.edge_values().items():
        assert v >= max(f[a], f[b]) - 1e-12
