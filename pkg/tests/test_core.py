import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsimpute.core import (
    MISSING,
    OBSERVED,
    PADDING,
    PeriodCheck,
    ReshapeSpec,
    TimeSeries,
    reshape_to_matrix,
    reshape_to_series,
    validate_period,
)
from tsimpute.errors import DataError, NonDivisorPeriod, PeriodExceedsLength


def test_six_values_period_three():
    m = reshape_to_matrix(np.arange(1.0, 7.0), np.ones(6, bool), ReshapeSpec(3))
    np.testing.assert_array_equal(m.cells, [[1, 2, 3], [4, 5, 6]])
    assert (m.cell_mask == OBSERVED).all()


def test_period_equal_to_length_is_one_row():
    m = reshape_to_matrix(np.arange(5.0), np.ones(5, bool), ReshapeSpec(5))
    assert m.cells.shape == (1, 5)


def test_pad_mode_tail():
    m = reshape_to_matrix(np.arange(1.0, 6.0), np.ones(5, bool), ReshapeSpec(3, "pad"))
    np.testing.assert_array_equal(m.cells[0], [1, 2, 3])
    np.testing.assert_array_equal(m.cells[1, :2], [4, 5])
    assert m.cell_mask[1, 2] == PADDING
    assert m.padding.sum() == 1


def test_strict_rejects_non_divisor():
    with pytest.raises(NonDivisorPeriod):
        reshape_to_matrix(np.arange(5.0), np.ones(5, bool), ReshapeSpec(3))


def test_period_longer_than_series():
    with pytest.raises(PeriodExceedsLength):
        reshape_to_matrix(np.arange(5.0), np.ones(5, bool), ReshapeSpec(6, "pad"))


def test_flatten_examples():
    m = reshape_to_matrix(np.arange(1.0, 7.0), np.ones(6, bool), ReshapeSpec(3))
    v, o = reshape_to_series(m)
    np.testing.assert_array_equal(v, [1, 2, 3, 4, 5, 6])
    m = reshape_to_matrix(np.arange(1.0, 6.0), np.ones(5, bool), ReshapeSpec(3, "pad"))
    v, o = reshape_to_series(m)
    np.testing.assert_array_equal(v, [1, 2, 3, 4, 5])
    assert o.all()


@pytest.mark.parametrize("t_i,p,expected", [
    (1440 * 7, 15, PeriodCheck.VALID),
    (100, 100, PeriodCheck.VALID),
    (100, 33, PeriodCheck.PAD_NEEDED),
    (10, 11, PeriodCheck.INVALID),
])
def test_validate_period(t_i, p, expected):
    assert validate_period(t_i, p) is expected


@st.composite
def series_and_spec(draw):
    n = draw(st.integers(1, 200))
    p = draw(st.integers(1, n))
    values = np.array(draw(st.lists(st.floats(-1e6, 1e6), min_size=n, max_size=n)))
    observed = np.array(draw(st.lists(st.booleans(), min_size=n, max_size=n)))
    return values, observed, ReshapeSpec(p, "pad")


@given(series_and_spec())
def test_round_trip_and_alignment(case):
    values, observed, spec = case
    m = reshape_to_matrix(values, observed, spec)
    v, o = reshape_to_series(m)
    assert v.tobytes() == values.tobytes()
    np.testing.assert_array_equal(o, observed)
    # conservation and alignment
    assert (m.cell_mask != PADDING).sum() == values.size
    p = spec.t_period
    for idx in range(values.size):
        r, c = divmod(idx, p)
        assert m.cells[r, c] == values[idx]
        assert m.cell_mask[r, c] == (OBSERVED if observed[idx] else MISSING)
    # padding only at the tail of the last row
    flat = m.cell_mask.reshape(-1)
    assert (flat[values.size:] == PADDING).all()
    assert m.cells.shape[0] * p - values.size < p


def test_timeseries_invariants():
    s = TimeSeries("a", [1.0, np.nan, 3.0], label=1)
    assert s.values.shape == (3, 1)
    assert s.observed[:, 0].tolist() == [True, False, True]
    with pytest.raises(DataError):
        TimeSeries("b", [1.0, np.inf], [True, True])
    with pytest.raises(DataError):
        TimeSeries("c", np.ones((3, 2)), np.ones((3, 1), bool))


def test_timeseries_hides_masked_values():
    s = TimeSeries("a", [1.0, 2.0, 3.0], [True, False, True])
    assert np.isnan(s.values[1, 0])
