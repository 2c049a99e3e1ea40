import math

import numpy as np
import pytest

from maccanon import (
    FLAG_INFEASIBLE,
    FLAG_SINGLE,
    FLAG_TIMESHARE,
    Admission,
    SolverOptions,
    UndecidedError,
    ValidationError,
    adm_mac,
    check_report,
    max_rmac,
    orderings,
    rate_allocation,
    trace_region_2user,
)

from .helpers import assert_flag_matches_allocations, scalar_channel

E = np.array([4.0, 4.0])


@pytest.fixture
def corners(channel2):
    center = max_rmac(channel2, E, [1.0, 1.0])
    return [
        rate_allocation(channel2, center.plan, order).totals
        for order in ((1, 0), (0, 1))
    ]


def test_zero_rates_are_admitted(channel2):
    report = adm_mac(channel2, [0.0, 0.0], E)
    assert report.flag == FLAG_SINGLE
    assert report.problem == "admmac"
    assert report.budget["b"] == [0.0, 0.0]


def test_rates_inside_a_vertex_need_one_order(channel2, corners):
    b = 0.9 * np.minimum(corners[0], corners[1])
    report = adm_mac(channel2, b, E)
    assert report.flag == FLAG_SINGLE
    assert np.all(report.rates >= b - 1e-6)
    check_report(channel2, report)


def test_rates_past_the_sum_capacity_are_rejected(channel2, corners):
    b = corners[0] + corners[1]
    report = adm_mac(channel2, b, E)
    assert report.flag == FLAG_INFEASIBLE
    vertex_rates = report.rates
    eps = 1e-6 * (1 + np.linalg.norm(b))
    # the recorded weights separate b from the region
    assert report.theta @ b > report.theta @ vertex_rates + eps


def test_midpoint_of_corners_needs_time_sharing(channel2, corners):
    b = 0.5 * (corners[0] + corners[1])
    report = adm_mac(channel2, b, E)
    assert report.flag == FLAG_TIMESHARE
    assert np.allclose(np.sort(report.alpha), [0.5, 0.5], atol=1e-6)
    assert sorted(report.orders) == [(0, 1), (1, 0)]
    assert set(report.orders) <= set(orderings(report.theta))
    assert_flag_matches_allocations(report, b)
    assert np.all(report.rates >= b - 1e-6)
    check_report(channel2, report)


def test_scaled_rates_bracket_the_boundary(channel2, corners):
    edge = 0.5 * (corners[0] + corners[1])
    inside = adm_mac(channel2, 0.9 * edge, E)
    outside = adm_mac(channel2, 1.1 * edge, E)
    assert_flag_matches_allocations(inside, 0.9 * edge)
    assert set(inside.orders) <= set(orderings(inside.theta))
    assert outside.flag == FLAG_INFEASIBLE


def test_round_cap_gives_undecided(channel2, corners):
    # past every vertex in b1 but below the sum capacity
    b = [corners[0][0] + corners[0][1] / 2, 0.0]
    options = SolverOptions(admission_rounds=1)
    with pytest.raises(UndecidedError) as info:
        adm_mac(channel2, b, E, options)
    assert info.value.gap is not None
    assert len(info.value.gap) == 2


def test_admission_answers_are_monotone(channel2, corners):
    admission = Admission(channel2, E)
    edge = 0.5 * (corners[0] + corners[1])
    flags = [admission.test(s * edge).flag for s in (1.2, 0.95, 0.5)]
    assert flags[0] == FLAG_INFEASIBLE
    assert flags[1] != FLAG_INFEASIBLE
    assert flags[2] != FLAG_INFEASIBLE


def test_admission_rejects_bad_input(channel2):
    with pytest.raises(ValidationError) as info:
        adm_mac(channel2, [-1.0, 0.0], E)
    assert info.value.field == "b"
    with pytest.raises(ValidationError) as info:
        adm_mac(channel2, [1.0, 1.0], [1.0, 0.0])
    assert info.value.field == "E"


def test_trace_needs_two_users(channel3):
    with pytest.raises(ValidationError) as info:
        trace_region_2user(channel3, [1.0, 1.0, 1.0])
    assert info.value.field == "U"


def test_trace_needs_two_grid_points():
    ch = scalar_channel(1.0, 1.0)
    with pytest.raises(ValidationError) as info:
        trace_region_2user(ch, [1.0, 1.0], grid_points=1)
    assert info.value.field == "grid_points"


def test_trace_scalar_pentagon():
    # b1 <= 1, b2 <= 1, b1 + b2 <= log2(3)
    ch = scalar_channel(1.0, 1.0)
    tol = 1e-2
    trace = trace_region_2user(ch, [1.0, 1.0], grid_points=5, tol=tol)
    assert len(trace.b1) == len(trace.b2) == 5
    assert np.allclose(trace.single_user, [1.0, 1.0], atol=1e-9)
    assert np.allclose(trace.b1, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-9)
    expected = np.minimum(1.0, math.log2(3) - trace.b1)
    assert np.all(trace.b2 <= expected + 1e-6)
    assert np.all(trace.b2 >= expected - tol - 1e-6)
    assert np.all(np.diff(trace.b2) <= tol)
    assert np.allclose(trace.corners[0], [1.0, math.log2(1.5)], atol=1e-9)
    assert np.allclose(trace.corners[1], [math.log2(1.5), 1.0], atol=1e-9)
    assert trace.undecided == 0


def test_trace_is_the_same_in_parallel():
    ch = scalar_channel(1.0, 0.5)
    serial = trace_region_2user(ch, [1.0, 2.0], grid_points=4, tol=1e-2)
    parallel = trace_region_2user(ch, [1.0, 2.0], grid_points=4, tol=1e-2,
                                  options=SolverOptions(workers=3))
    assert np.array_equal(serial.b2, parallel.b2)
