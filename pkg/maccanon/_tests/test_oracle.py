import math

import numpy as np
import pytest

from maccanon import (
    BruteProblem,
    ValidationError,
    brute_solve,
    exact_membership,
    max_resmac,
    max_rmac,
    waterfill,
)

from .helpers import small_channel


def test_waterfill_two_modes():
    result = waterfill(np.diag([1.0, 2.0]), 1.0)
    assert result.level == pytest.approx(1.125)
    assert np.allclose(result.powers, [0.125, 0.875])
    assert result.rate == pytest.approx(
        math.log2(1.125) + math.log2(4.5), abs=1e-12
    )


def test_waterfill_drops_weak_modes():
    # level 1.5 < 1/0.5, so the weak mode stays dry
    result = waterfill(np.diag([1.0, math.sqrt(0.5)]), 0.5)
    assert np.allclose(result.powers, [0.0, 0.5])
    assert result.level == pytest.approx(1.5)
    assert result.rate == pytest.approx(math.log2(1.5))


def test_waterfill_over_tones_and_baseband():
    tones = [np.eye(1), 2 * np.eye(1)]
    result = waterfill(tones, 2.0)
    assert result.powers.sum() == pytest.approx(2.0)
    real = waterfill(tones, 2.0, c_b=2)
    assert real.rate == pytest.approx(result.rate / 2)


def test_waterfill_edge_cases():
    assert waterfill(np.zeros((2, 2)), 1.0).rate == 0.0
    with pytest.raises(ValidationError) as info:
        waterfill(np.eye(2), 0.0)
    assert info.value.field == "E"


def test_exact_membership():
    V = [[0.0, 1.0], [1.0, 0.0]]
    assert exact_membership(V, [0.5, 0.5])
    assert exact_membership(V, [1.0, 0.0])
    assert not exact_membership(V, [0.6, 0.6])
    assert not exact_membership(V, [0.4, 0.4])


def test_brute_force_agrees_with_max_rmac():
    ch = small_channel(users=2, rx=2, tx=2, tones=1, seed=21)
    theta = (1.0, 2.0)
    energies = (2.0, 1.0)
    solved = max_rmac(ch, energies, theta).objective
    brute = brute_solve(
        ch, BruteProblem("maxrmac", theta, energies=energies),
        restarts=4, iterations=2000,
    )
    assert brute <= solved + 1e-4
    assert brute >= solved * (1 - 1e-2)


def test_brute_force_agrees_with_max_resmac():
    ch = small_channel(users=2, rx=2, tx=1, tones=2, seed=22)
    theta = (1.0, 1.0)
    solved = max_resmac(ch, 3.0, theta).objective
    brute = brute_solve(
        ch, BruteProblem("maxresmac", theta, total=3.0),
        restarts=4, iterations=2000, workers=2,
    )
    assert brute <= solved * (1 + 1e-3)
    assert brute >= solved * (1 - 1e-2)


def test_brute_force_is_reproducible():
    ch = small_channel(users=2, rx=1, tx=1, tones=1, seed=23)
    problem = BruteProblem("maxrmac", (1.0, 1.0), energies=(1.0, 1.0))
    first = brute_solve(ch, problem, restarts=2, iterations=50, seed=4)
    again = brute_solve(ch, problem, restarts=2, iterations=50, seed=4,
                        workers=2)
    assert first == again


def test_brute_force_rejects_unknown_problem(channel2):
    with pytest.raises(ValidationError) as info:
        brute_solve(channel2, BruteProblem("minpmac", (1.0, 1.0)))
    assert info.value.field == "kind"
