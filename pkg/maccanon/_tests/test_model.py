import numpy as np
import pytest
from hypothesis import given, strategies as st

from maccanon import (
    ChannelSet,
    ChannelSpec,
    CovariancePlan,
    ErrorGroup,
    RateAllocation,
    ValidationError,
    dual_bc_channel,
    exponential_correlation,
    generate_channel,
    whiten,
)
from maccanon._model import _psd_sqrt


def test_default_spec_matches_reference_configuration():
    spec = ChannelSpec()
    assert (spec.num_users, spec.rx_antennas, spec.num_tones) == (4, 4, 16)
    assert spec.tx_antennas == (2, 2, 2, 2)
    ch = generate_channel(spec)
    assert ch.num_users == 4
    assert ch.num_tones == 16
    assert ch.rx_antennas == 4
    assert ch.tx_antennas == (2, 2, 2, 2)
    assert ch.total_tx == 8
    assert ch.c_b == 1


def test_generation_is_a_pure_function_of_the_spec():
    spec = ChannelSpec(num_users=2, num_tones=8, taps=3, seed=7)
    assert generate_channel(spec) == generate_channel(spec)
    other = generate_channel(ChannelSpec(num_users=2, num_tones=8, taps=3,
                                         seed=8))
    assert other != generate_channel(spec)


def test_flat_channel_is_identical_on_every_tone():
    ch = generate_channel(ChannelSpec(num_users=2, num_tones=4, taps=1))
    for n in range(1, 4):
        for u in range(2):
            assert np.array_equal(ch.tone(n)[u], ch.tone(0)[u])


def test_frequency_selective_channel_varies_over_tones():
    ch = generate_channel(ChannelSpec(num_users=1, num_tones=8, taps=3))
    assert not np.allclose(ch.tone(0)[0], ch.tone(1)[0])


def test_tone_entries_have_unit_variance():
    spec = ChannelSpec(num_users=4, rx_antennas=8, tx_antennas=8,
                       num_tones=64, taps=3, seed=3)
    ch = generate_channel(spec)
    power = np.mean([np.mean(np.abs(h) ** 2) for tone in ch.H for h in tone])
    assert power == pytest.approx(1.0, abs=0.15)


def test_kronecker_model_shapes_the_iid_draw():
    common = dict(num_users=2, rx_antennas=3, tx_antennas=2, num_tones=4,
                  taps=2, seed=11)
    iid = generate_channel(ChannelSpec(**common))
    kron = generate_channel(ChannelSpec(model="kronecker_exponential",
                                        rho_tx=0.5, rho_rx=0.7, **common))
    rx_half = _psd_sqrt(exponential_correlation(3, 0.7))
    tx_half = _psd_sqrt(exponential_correlation(2, 0.5))
    for n in range(4):
        for u in range(2):
            expected = rx_half @ iid.tone(n)[u] @ tx_half
            assert np.allclose(kron.tone(n)[u], expected)


def test_real_baseband_channel():
    ch = generate_channel(ChannelSpec(num_users=2, c_b=2, seed=4))
    assert ch.c_b == 2
    assert all(not np.any(h.imag) for tone in ch.H for h in tone)


def test_exponential_correlation():
    R = exponential_correlation(3, 0.5)
    assert np.allclose(R, [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]])
    assert np.allclose(exponential_correlation(2, 0.0), np.eye(2))


def test_spec_rejects_correlation_of_one():
    with pytest.raises(ValidationError) as info:
        ChannelSpec(rho_tx=1.0)
    assert info.value.field == "rho_tx"


def test_spec_collects_several_problems():
    with pytest.raises(ErrorGroup) as info:
        ChannelSpec(num_tones=2, taps=3, rho_rx=-0.1)
    assert sorted(info.value.sources) == ["rho_rx", "taps"]


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(num_users=0), "num_users"),
        (dict(model="rician"), "model"),
        (dict(c_b=3), "c_b"),
        (dict(c_b=2, taps=2), "taps"),
        (dict(seed=-1), "seed"),
        (dict(tx_antennas=(2, 2)), "tx_antennas"),
    ],
)
def test_spec_validation_names_the_field(kwargs, field):
    with pytest.raises(ValidationError) as info:
        ChannelSpec(**kwargs)
    assert info.value.field == field


def test_channel_set_rejects_bad_baseband_constant():
    with pytest.raises(ValidationError) as info:
        ChannelSet([[np.eye(2)]], c_b=3)
    assert info.value.field == "c_b"


def test_channel_set_names_mismatched_matrix():
    H = [
        [np.ones((2, 2)), np.ones((2, 1))],
        [np.ones((2, 2)), np.ones((3, 1))],
    ]
    with pytest.raises(ValidationError) as info:
        ChannelSet(H, rx_antennas=2, tx_antennas=[2, 1])
    assert info.value.field == "H[n=1][u=1]"
    assert "H[n=1][u=1]" in str(info.value)


def test_channel_set_rejects_non_finite_and_imaginary_entries():
    bad = np.eye(2, dtype=complex)
    bad[0, 1] = np.nan
    with pytest.raises(ValidationError):
        ChannelSet([[bad]])
    with pytest.raises(ValidationError):
        ChannelSet([[1j * np.eye(2)]], c_b=2)


def test_channel_set_matrices_are_read_only(channel2):
    with pytest.raises(ValueError):
        channel2.tone(0)[0][0, 0] = 5.0


def test_silent_user_detection():
    ch = ChannelSet([[np.zeros((2, 1)), np.ones((2, 1))]])
    assert ch.user_is_silent(0)
    assert not ch.user_is_silent(1)


def test_whiten_scaled_identity():
    H = np.arange(6, dtype=float).reshape(3, 2)
    assert np.allclose(whiten(H, 4 * np.eye(3)), H / 2)


@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=2 ** 32 - 1),
)
def test_whitened_noise_is_white(size, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((size, size)) + 1j * rng.standard_normal(
        (size, size)
    )
    noise = A @ A.conj().T + 0.1 * np.eye(size)
    W = whiten(np.eye(size), noise)
    assert np.allclose(W @ noise @ W.conj().T, np.eye(size), atol=1e-8)


@pytest.mark.parametrize(
    "noise",
    [
        np.diag([1.0, 0.0]),
        np.array([[1.0, 2.0], [0.0, 1.0]]),
        np.eye(3),
        np.ones(2),
    ],
)
def test_whiten_rejects_bad_noise(noise):
    with pytest.raises(ValidationError) as info:
        whiten(np.ones((2, 2)), noise)
    assert info.value.field == "noise_cov"


def test_dual_channel_round_trip(channel3):
    dual = dual_bc_channel(channel3)
    assert dual.dual
    assert dual.rx_dims == (1, 1, 1)
    assert np.array_equal(dual.tone(0)[0], channel3.tone(0)[2].conj().T)
    assert dual_bc_channel(dual) == channel3
    with pytest.raises(ValidationError):
        dual.require_mac()
    with pytest.raises(ValidationError):
        dual.rx_antennas


def test_covariance_plan_energies_and_scaling(channel2):
    plan = CovariancePlan([
        [np.eye(2), np.diag([2.0, 0.0])],
        [np.zeros((2, 2)), np.eye(2)],
    ])
    plan.check_against(channel2)
    assert np.allclose(plan.energies(), [2.0, 4.0])
    assert plan.total_energy() == pytest.approx(6.0)
    assert np.allclose(plan.scaled([0.5, 2.0]).energies(), [1.0, 8.0])
    assert CovariancePlan.zeros(channel2).total_energy() == 0.0


def test_covariance_plan_from_factors():
    B = np.array([[1.0, 1j], [0.0, 2.0]])
    plan = CovariancePlan.from_factors([[B]])
    assert np.allclose(plan.tone(0)[0], B @ B.conj().T)
    assert np.allclose(plan.scaled(4.0).factors[0][0], 2 * B)


def test_covariance_plan_rejects_non_psd():
    with pytest.raises(ValidationError) as info:
        CovariancePlan([[np.diag([1.0, -1.0])]])
    assert info.value.field == "R[n=0][u=0]"
    with pytest.raises(ValidationError):
        CovariancePlan([[np.array([[1.0, 1.0], [0.0, 1.0]])]])


def test_rate_allocation_validation():
    alloc = RateAllocation([[1.0, 2.0], [0.5, 0.0]], (1, 0), plan_index=2)
    assert np.allclose(alloc.totals, [1.5, 2.0])
    assert alloc.plan_index == 2
    with pytest.raises(ValidationError) as info:
        RateAllocation([[1.0, 2.0]], (0, 0))
    assert info.value.field == "order"
    with pytest.raises(ValidationError):
        RateAllocation([[-1.0, 2.0]], (0, 1))
