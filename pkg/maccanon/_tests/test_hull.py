import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog, nnls

from maccanon import (
    ValidationError,
    VertexSet,
    exact_membership,
    fw_membership,
    simplex_phase_one,
    timeshare_lp,
)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)

CORNERS = [(1.0, math.log2(1.5)), (math.log2(1.5), 1.0)]


def test_vertex_set_deduplicates():
    V = VertexSet(dimension=2)
    assert len(V) == 0
    assert V.add([1.0, 0.0], tag=(0, 1))
    assert not V.add([1.0 + 1e-12, 0.0], tag=(1, 0))
    assert V.add([0.0, 1.0], tag=(1, 0))
    assert len(V) == 2
    assert V.tags == [(0, 1), (1, 0)]
    assert np.array_equal(V.points, [[1.0, 0.0], [0.0, 1.0]])
    assert repr(V) == "<VertexSet 2 vertices in R^2>"


def test_vertex_set_validation():
    with pytest.raises(ValidationError):
        VertexSet([[1.0, -0.5]])
    with pytest.raises(ValidationError):
        VertexSet([[1.0, np.inf]])
    with pytest.raises(ValidationError):
        VertexSet([[1.0, 0.0]], tags=["a", "b"])
    V = VertexSet([[1.0, 0.0]])
    with pytest.raises(ValidationError):
        V.add([1.0, 0.0, 0.0])
    with pytest.raises(ValidationError):
        timeshare_lp(VertexSet(dimension=2), [0.0, 0.0])


def test_simplex_phase_one():
    x = simplex_phase_one([[1.0, 1.0]], [2.0])
    assert x is not None
    assert np.all(x >= 0)
    assert x.sum() == pytest.approx(2.0)
    assert simplex_phase_one([[1.0, 1.0]], [-1.0]) is None
    x = simplex_phase_one([[1.0, -1.0]], [-3.0])
    assert x @ [1.0, -1.0] == pytest.approx(-3.0)


def test_timeshare_between_two_corners():
    alpha = timeshare_lp(CORNERS, [0.79, 0.79])
    assert alpha is not None
    assert alpha.sum() == pytest.approx(1.0)
    assert np.allclose(alpha, [0.5, 0.5], atol=0.01)
    achieved = alpha @ np.array(CORNERS)
    assert np.all(achieved >= 0.79 - 1e-9)


def test_timeshare_trivial_target():
    assert np.array_equal(timeshare_lp(CORNERS, [0.0, 0.0]), [1.0, 0.0])


def test_timeshare_infeasible_target():
    assert timeshare_lp(CORNERS, [1.1, 1.1]) is None
    assert timeshare_lp(CORNERS, [0.8, 0.8]) is None


def test_timeshare_counts_a_near_miss_as_meeting():
    V = [[1.0 - 5e-10, 1.0], [0.0, 2.0]]
    assert np.array_equal(timeshare_lp(V, [1.0, 1.0]), [1.0, 0.0])
    assert timeshare_lp(V, [1.0 + 1e-8, 1.0]) is None


def test_timeshare_rejects_wrong_dimension():
    with pytest.raises(ValidationError) as info:
        timeshare_lp(CORNERS, [0.5, 0.5, 0.5])
    assert info.value.field == "b_min"


def best_margin(points, b_min):
    """max t such that some mixture reaches b_min + t, via scipy."""
    K, m = points.shape
    c = np.zeros(K + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-points.T, np.ones((m, 1))])
    A_eq = np.append(np.ones(K), 0.0)[None, :]
    result = linprog(c, A_ub=A_ub, b_ub=-b_min, A_eq=A_eq, b_eq=[1.0],
                     bounds=[(0, None)] * K + [(None, None)],
                     method="highs")
    assert result.status == 0
    return -result.fun


@given(seeds)
def test_timeshare_agrees_with_scipy(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 5))
    K = int(rng.integers(2, 9))
    points = rng.uniform(0, 2, size=(K, m))
    b_min = rng.uniform(0, 1.5, size=m)
    margin = best_margin(points, b_min)
    alpha = timeshare_lp(points, b_min)
    if margin > 1e-6:
        assert alpha is not None
        assert np.all(alpha >= 0)
        assert alpha.sum() == pytest.approx(1.0)
        assert np.all(alpha @ points >= b_min - 1e-9)
    elif margin < -1e-6:
        assert alpha is None


def test_membership_midpoint():
    result = fw_membership([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
    assert result.inside
    assert result.distance == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(result.weights, [0.5, 0.5])


def test_membership_outside_point():
    result = fw_membership([[0.0, 1.0], [1.0, 0.0]], [0.6, 0.6])
    assert not result.inside
    assert result.distance == pytest.approx(0.141421, abs=1e-6)
    assert result.gap >= 0


def test_membership_at_a_vertex():
    result = fw_membership([[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]], [2.0, 2.0])
    assert result.inside
    assert np.array_equal(result.weights, [0.0, 0.0, 1.0])


def test_membership_dominate_mode():
    V = [[0.0, 1.0], [1.0, 0.0]]
    assert not fw_membership(V, [0.4, 0.4]).inside
    dominated = fw_membership(V, [0.4, 0.4], dominate=True)
    assert dominated.inside
    assert np.all(dominated.weights @ np.array(V) >= 0.4 - 1e-6)
    assert not fw_membership(V, [0.6, 0.6], dominate=True).inside


def test_membership_rejects_wrong_dimension():
    with pytest.raises(ValidationError) as info:
        fw_membership([[0.0, 1.0]], [0.0, 1.0, 2.0])
    assert info.value.field == "target"


@given(seeds, st.booleans())
def test_membership_agrees_with_exact_oracle(seed, inside):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 5))
    K = int(rng.integers(m + 1, 25))
    points = rng.uniform(0, 1, size=(K, m))
    if inside:
        target = rng.dirichlet(np.ones(K)) @ points
    else:
        # past the largest coordinate of every vertex
        target = points.max(axis=0) + rng.uniform(0.01, 0.5, size=m)
    assert exact_membership(points, target) == inside
    result = fw_membership(points, target, tol=1e-6)
    assert result.inside == inside
    assert result.weights.sum() == pytest.approx(1.0)
    assert np.all(result.weights >= 0)


def nnls_distance(points, target, weight=1e4):
    """Distance to the hull, with the simplex row enforced by a penalty."""
    A = np.vstack([points.T, weight * np.ones(len(points))])
    b = np.append(target, weight)
    alpha, _ = nnls(A, b)
    return np.linalg.norm(points.T @ alpha - target)


@given(seeds)
def test_membership_distance_is_never_below_the_projection(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4))
    points = rng.uniform(0, 1, size=(int(rng.integers(2, 10)), m))
    target = rng.uniform(-0.5, 1.5, size=m)
    result = fw_membership(points, target, tol=1e-6)
    # the returned weights are a feasible point, so they bound the distance
    assert result.distance >= nnls_distance(points, target) - 1e-3
    achieved = result.weights @ points
    assert np.linalg.norm(achieved - target) == pytest.approx(
        result.distance, abs=1e-9
    )
