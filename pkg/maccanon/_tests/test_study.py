import numpy as np
import pytest

from maccanon import single_user_rates, timeshare_study, waterfill
from maccanon import _study
from maccanon._study import STUDY_COLUMNS, StudyCell, trial_seed

from .helpers import small_channel


def test_trial_seed_is_stable_and_distinct():
    assert trial_seed(0, 4, 1) == trial_seed(0, 4, 1)
    seeds = {trial_seed(0, n, t) for n in (1, 4) for t in range(3)}
    assert len(seeds) == 6
    assert trial_seed(1, 4, 1) != trial_seed(0, 4, 1)


def test_empty_cell():
    cell = StudyCell(tones=4, rho=0.9)
    assert cell.timeshare_prob == 0.0
    assert cell.mean_alpha_max is None
    assert cell.alpha_residual == 0.0
    assert cell.row() == (4, 0.9, 0, 0.0, None, 0, 0)
    assert len(cell.row()) == len(STUDY_COLUMNS)


def test_single_user_rates_match_waterfilling():
    ch = small_channel(users=2, rx=2, tx=1, tones=2, seed=4)
    E = np.array([3.0, 5.0])
    rates = single_user_rates(ch, E)
    for u in range(2):
        alone = waterfill([ch.tone(n)[u] for n in range(2)], E[u]).rate
        assert rates[u] == pytest.approx(alone, rel=1e-4)


def test_study_targets_are_scaled_single_user_rates(monkeypatch):
    seen = []
    real = _study.min_pmac

    def recording_min_pmac(ch, b_min, w, options):
        seen.append((ch, np.array(b_min)))
        return real(ch, b_min, w, options)

    monkeypatch.setattr(_study, "min_pmac", recording_min_pmac)
    timeshare_study([1], [0.5, 0.9], 1, users=2, rx_antennas=2,
                    tx_antennas=1, seed=2)
    assert len(seen) == 2
    ch = seen[0][0]
    solo = single_user_rates(ch, np.full(2, 10.0))
    assert np.allclose(seen[0][1], 0.5 * solo, rtol=1e-12)
    assert np.allclose(seen[1][1], 0.9 * solo, rtol=1e-12)


def test_small_sweep():
    kwargs = dict(tones=[1, 2], rhos=[0.5, 0.9], trials=2, users=2,
                  rx_antennas=2, tx_antennas=1, seed=3)
    cells = timeshare_study(**kwargs)
    assert [(c.tones, c.rho) for c in cells] == [
        (1, 0.5), (1, 0.9), (2, 0.5), (2, 0.9),
    ]
    for cell in cells:
        assert cell.trials == 2
        assert 0.0 <= cell.timeshare_prob <= 1.0
        assert cell.infeasible + cell.nonconverged <= cell.trials
        assert cell.alpha_residual <= 1e-8
        if cell.mean_alpha_max is not None:
            # two users, at least two vertices per mixture
            assert 0.5 <= cell.mean_alpha_max < 1.0
    again = timeshare_study(**kwargs)
    assert [c.row() for c in again] == [c.row() for c in cells]
