import numpy as np

from maccanon import ChannelSet, ChannelSpec, CovariancePlan, generate_channel


def small_channel(users=2, rx=2, tx=2, tones=2, seed=0, taps=1, c_b=1):
    return generate_channel(
        ChannelSpec(
            num_users=users,
            rx_antennas=rx,
            tx_antennas=tx,
            num_tones=tones,
            taps=taps,
            c_b=c_b,
            seed=seed,
        )
    )


def scalar_channel(*gains, tones=1):
    """One receive antenna, one transmit antenna per user."""
    return ChannelSet(
        [[np.full((1, 1), g, dtype=complex) for g in gains]] * tones
    )


def random_plan(ch, rng, scale=1.0):
    R = []
    for _ in range(ch.num_tones):
        tone = []
        for lx in ch.tx_antennas:
            A = rng.standard_normal((lx, lx))
            if ch.c_b == 1:
                A = A + 1j * rng.standard_normal((lx, lx))
            tone.append(scale * A @ A.conj().T)
        R.append(tone)
    return CovariancePlan(R)


def random_instance(seed, max_users=4, max_rx=3, max_tx=2, tones=1):
    rng = np.random.default_rng(seed)
    users = int(rng.integers(1, max_users + 1))
    ch = small_channel(
        users=users,
        rx=int(rng.integers(1, max_rx + 1)),
        tx=tuple(int(t) for t in rng.integers(1, max_tx + 1, size=users)),
        tones=tones,
        seed=seed,
    )
    return ch, random_plan(ch, rng), rng


def assert_flag_matches_allocations(report, b_min=None):
    """Flag 1 is one allocation; flag 2 mixes two or more with alpha > 0."""
    alpha = np.asarray(report.alpha)
    assert report.flag in (1, 2)
    assert len(alpha) == len(report.allocations)
    assert abs(alpha.sum() - 1.0) <= 1e-12
    if report.flag == 1:
        assert len(report.allocations) == 1
    else:
        assert len(report.allocations) >= 2
        assert np.all(alpha > 0)
    if b_min is not None:
        assert np.all(report.rates >= np.asarray(b_min) - 1e-8)
