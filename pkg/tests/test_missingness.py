import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsimpute.core import TimeSeries
from tsimpute.errors import PreexistingMissing, RateOutOfRange
from tsimpute.missingness import (
    MaskedSeries,
    MissingSpec,
    hidden_count,
    mask_stats,
    simulate_mcar,
)


def _series(n=100, d=1, seed=0):
    return TimeSeries("s", np.random.default_rng(seed).random((n, d)))


def test_ten_percent_of_hundred():
    m = simulate_mcar(_series(), MissingSpec(0.1, 3))
    assert m.sim_mask.sum() == 10
    assert (~m.corrupted.observed).sum() == 10


def test_zero_rate_identity():
    s = _series()
    m = simulate_mcar(s, MissingSpec(0.0, 3))
    assert not m.sim_mask.any()
    np.testing.assert_array_equal(m.corrupted.values, s.values)


def test_deterministic():
    s = _series()
    a = simulate_mcar(s, MissingSpec(0.4, 99))
    b = simulate_mcar(s, MissingSpec(0.4, 99))
    np.testing.assert_array_equal(a.sim_mask, b.sim_mask)


def test_errors():
    with pytest.raises(RateOutOfRange):
        MissingSpec(0.96)
    with pytest.raises(RateOutOfRange):
        MissingSpec(-0.1)
    s = TimeSeries("s", [1.0, np.nan, 2.0])
    with pytest.raises(PreexistingMissing):
        simulate_mcar(s, MissingSpec(0.3))


def test_round_half_up():
    assert hidden_count(0.35, 10) == 4
    assert hidden_count(0.25, 10) == 3
    assert hidden_count(0.3, 960) == 288


@given(st.floats(0, 0.95), st.integers(1, 300), st.integers(1, 3), st.integers(0, 2**32))
def test_masked_series_invariants(rate, n, d, seed):
    s = _series(n, d, seed % 7)
    m = simulate_mcar(s, MissingSpec(rate, seed))
    assert m.sim_mask.sum() == hidden_count(rate, n * d)
    keep = ~m.sim_mask
    np.testing.assert_array_equal(m.corrupted.values[keep], s.values[keep])
    assert np.isnan(m.corrupted.values[m.sim_mask]).all()
    assert m.ground_truth is s


def test_uniformity():
    s = _series(100)
    hits = np.zeros(100)
    for seed in range(10_000):
        hits += simulate_mcar(s, MissingSpec(0.5, seed)).sim_mask[:, 0]
    freq = hits / 10_000
    assert freq.min() >= 0.45 and freq.max() <= 0.55


def _masked(n, hidden):
    s = _series(n)
    mask = np.zeros((n, 1), bool)
    mask[list(hidden), 0] = True
    return MaskedSeries(s.replace(s.values, ~mask), s, mask)


def test_mask_stats():
    st0 = mask_stats(_masked(10, []))
    assert (st0.hidden_count, st0.achieved_rate, st0.longest_gap) == (0, 0.0, 0)
    st1 = mask_stats(_masked(10, range(9)))
    assert st1.hidden_count == 9 and st1.achieved_rate == 0.9 and st1.longest_gap <= 9
    assert mask_stats(_masked(10, [3, 4, 5])).longest_gap == 3


def test_mask_stats_multichannel_takes_max():
    s = _series(6, 2)
    mask = np.zeros((6, 2), bool)
    mask[0:2, 0] = True
    mask[1:5, 1] = True
    st = mask_stats(MaskedSeries(s.replace(s.values, ~mask), s, mask))
    assert st.longest_gap == 4 and st.hidden_count == 6
