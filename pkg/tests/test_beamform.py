"""Beamformer construction and SNR evaluation invariants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twrelay import (ChannelPair, build_antenna_selection, build_direct_af,
                     build_proposed, sample_channel_pair, snr_pair_general,
                     snr_pair_proposed, substream, w_statistic)
from twrelay.errors import (DegenerateChannelError, DimensionError,
                            DomainError)

SEEDS = st.integers(0, 2**32 - 1)


def _random_channel(seed, n):
    return sample_channel_pair(n, substream(seed, 0))


def test_proposed_identity_for_real_positive_channels():
    ch = ChannelPair(np.array([1.0, 2.5, 0.3], dtype=complex),
                     np.array([0.7, 1.1, 4.0], dtype=complex))
    bf = build_proposed(ch)
    assert np.allclose(bf.q, np.eye(3))


def test_proposed_single_antenna_phase():
    ch = ChannelPair(np.array([1j]), np.array([1.0 + 0j]))
    bf = build_proposed(ch)
    assert bf.q[0, 0] == pytest.approx(-1j, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 6))
def test_proposed_aligns_signal_term(seed, n):
    ch = _random_channel(seed, n)
    q = build_proposed(ch).q
    sig = ch.h @ q @ ch.g
    expected = float(np.sum(np.abs(ch.h) * np.abs(ch.g)))
    assert sig.real == pytest.approx(expected, rel=1e-12)
    assert abs(sig.imag) <= 1e-12 * abs(sig)


def test_snr_general_hand_value():
    ch = ChannelPair(np.array([1.0 + 0j]), np.array([1.0 + 0j]))
    eye = build_direct_af(1)
    pair = snr_pair_general(ch, eye, 1.0)
    assert pair.snr1 == pytest.approx(0.25, rel=1e-15)
    assert pair.snr2 == pytest.approx(0.25, rel=1e-15)
    # rho -> large limit: snr1 -> rho / 3
    big = snr_pair_general(ch, eye, 1e9)
    assert big.snr1 == pytest.approx(1e9 / 3.0, rel=1e-6)


def test_snr_proposed_hand_values():
    ch = ChannelPair(np.array([1.0 + 0j]), np.array([1.0 + 0j]))
    assert snr_pair_proposed(ch, 1.0).snr1 == pytest.approx(0.25, rel=1e-15)
    for n in (2, 5):
        ones = np.ones(n, dtype=complex)
        ch_n = ChannelPair(ones, ones)
        for rho in (0.5, 3.0, 100.0):
            expected = n * rho / (3.0 + 1.0 / rho)
            assert snr_pair_proposed(ch_n, rho).snr1 == pytest.approx(expected, rel=1e-12)


def test_equivalence_sweep_proposed_vs_general():
    worst = 0.0
    for n in (2, 3, 4):
        for i in range(3000):
            ch = sample_channel_pair(n, substream(1000 + n, i))
            for rho in (0.1, 1.0, 100.0):
                fast = snr_pair_proposed(ch, rho)
                ref = snr_pair_general(ch, build_proposed(ch), rho)
                worst = max(worst,
                            abs(fast.snr1 - ref.snr1) / ref.snr1,
                            abs(fast.snr2 - ref.snr2) / ref.snr2)
    assert worst < 1e-10


def test_direct_af_is_identity():
    bf = build_direct_af(2)
    assert np.array_equal(bf.q, np.eye(2))
    with pytest.raises(DimensionError):
        build_direct_af(0)


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS)
def test_direct_equals_proposed_at_n1(seed):
    ch = _random_channel(seed, 1)
    rho = 7.7
    a = snr_pair_general(ch, build_direct_af(1), rho)
    b = snr_pair_general(ch, build_proposed(ch), rho)
    assert a.snr1 == pytest.approx(b.snr1, rel=1e-12)
    assert a.snr2 == pytest.approx(b.snr2, rel=1e-12)


def test_selection_trivial_cases():
    ch1 = _random_channel(3, 1)
    assert build_antenna_selection(ch1, 5.0).antenna == 0
    ch = ChannelPair(np.array([10.0 + 0j, 1.0 + 0j]),
                     np.array([10.0 + 0j, 1.0 + 0j]))
    assert build_antenna_selection(ch, 5.0).antenna == 0


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 6))
def test_selection_matches_exhaustive_min_snr(seed, n):
    ch = _random_channel(seed, n)
    rho = 13.0
    bf = build_antenna_selection(ch, rho)
    mins = []
    for k in range(n):
        q = np.zeros((n, n), dtype=complex)
        q[k, k] = 1.0  # phase does not affect the SNR
        from twrelay.beamform import Beamformer
        pair = snr_pair_general(ch, Beamformer(q, "selection", antenna=k), rho)
        mins.append(min(pair.snr1, pair.snr2))
    assert bf.antenna == int(np.argmax(mins))
    assert np.count_nonzero(bf.q) == 1
    assert abs(bf.q[bf.antenna, bf.antenna]) == pytest.approx(1.0, rel=1e-15)


def test_w_statistic_cases():
    ones = np.ones(4, dtype=complex)
    assert w_statistic(ChannelPair(ones, ones)) == pytest.approx(4.0, rel=1e-12)
    ch1 = _random_channel(11, 1)
    assert w_statistic(ch1) == pytest.approx(1.0, abs=1e-12)
    eps = 1e-3
    ch = ChannelPair(np.array([1.0 + 0j, eps * 1j]), np.array([eps + 0j, 1.0 + 0j]))
    # direct evaluation: (2 eps)^2 / ((1/2)(1 + eps^2)^2)
    expected = 8 * eps**2 / (1 + eps**2) ** 2
    assert w_statistic(ch) == pytest.approx(expected, rel=1e-12)
    assert w_statistic(ch) < 0.01
    with pytest.raises(DegenerateChannelError):
        w_statistic(ChannelPair(np.zeros(2, dtype=complex), np.ones(2, dtype=complex)))


@settings(max_examples=80, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 8))
def test_w_within_cauchy_schwarz_cap(seed, n):
    w = w_statistic(_random_channel(seed, n))
    assert 0.0 <= w <= n + 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 5))
def test_swap_symmetry_all_schemes(seed, n):
    ch = _random_channel(seed, n)
    swapped = ChannelPair(ch.g, ch.h)
    rho = 3.3
    for build in (lambda c: build_proposed(c),
                  lambda c: build_direct_af(c.n),
                  lambda c: build_antenna_selection(c, rho)):
        a = snr_pair_general(ch, build(ch), rho)
        b = snr_pair_general(swapped, build(swapped), rho)
        assert a.snr1 == pytest.approx(b.snr2, rel=1e-12)
        assert a.snr2 == pytest.approx(b.snr1, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 5), phase=st.floats(0.0, 2 * np.pi))
def test_unit_scalar_rescaling_invariance(seed, n, phase):
    ch = _random_channel(seed, n)
    bf = build_proposed(ch)
    scaled = type(bf)(np.exp(1j * phase) * bf.q, bf.scheme)
    a = snr_pair_general(ch, bf, 2.0)
    b = snr_pair_general(ch, scaled, 2.0)
    assert b.snr1 == pytest.approx(a.snr1, rel=1e-12)
    assert b.snr2 == pytest.approx(a.snr2, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 5))
def test_snr_strictly_increasing_in_rho(seed, n):
    ch = _random_channel(seed, n)
    rhos = [0.1, 1.0, 10.0, 1000.0]
    vals = [snr_pair_proposed(ch, r) for r in rhos]
    for lo, hi in zip(vals, vals[1:]):
        assert hi.snr1 > lo.snr1
        assert hi.snr2 > lo.snr2


def test_dimension_and_domain_errors():
    ch = _random_channel(0, 3)
    with pytest.raises(DimensionError):
        snr_pair_general(ch, build_direct_af(2), 1.0)
    with pytest.raises(DomainError):
        snr_pair_general(ch, build_direct_af(3), 0.0)
    with pytest.raises(DomainError):
        snr_pair_proposed(ch, -1.0)
    with pytest.raises(DomainError):
        build_antenna_selection(ch, 0.0)
