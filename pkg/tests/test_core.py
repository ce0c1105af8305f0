"""Domain type invariants: series pairs, change-point sets, estimates."""

import numpy as np
import pytest

from stgc import (
    ChangePointSet,
    CoefficientSchedule,
    DegenerateInput,
    Direction,
    EndpointMismatch,
    GcEstimate,
    GcKind,
    InvalidConfig,
    LengthMismatch,
    NotIncreasing,
    TimeSeriesPair,
    WindowTooShort,
    refinement_of,
    validate_changepoints,
)


class TestTimeSeriesPair:
    def test_basic_properties(self):
        pair = TimeSeriesPair(np.arange(6.0), np.arange(6.0) ** 2)
        assert pair.n_samples == 6
        assert pair.n_steps == 5

    def test_rejects_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            TimeSeriesPair(np.zeros(6), np.zeros(7))

    def test_rejects_short_series(self):
        with pytest.raises(DegenerateInput):
            TimeSeriesPair(np.zeros(4), np.zeros(4))

    def test_rejects_nonfinite(self):
        x = np.arange(6.0)
        x_bad = x.copy()
        x_bad[3] = np.nan
        with pytest.raises(InvalidConfig):
            TimeSeriesPair(x_bad, x)

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(InvalidConfig):
            TimeSeriesPair(np.arange(6.0), np.arange(6.0), dt=0.0)

    def test_channel_lookup(self):
        pair = TimeSeriesPair(np.arange(6.0), np.arange(6.0) + 1)
        assert np.array_equal(pair.channel("x"), pair.x)
        assert np.array_equal(pair.channel("y"), pair.y)
        with pytest.raises(KeyError):
            pair.channel("z")

    def test_swapped_exchanges_channels_and_labels(self):
        pair = TimeSeriesPair(
            np.arange(6.0), np.arange(6.0) + 1, labels=("a", "b")
        )
        sw = pair.swapped()
        assert np.array_equal(sw.x, pair.y)
        assert np.array_equal(sw.y, pair.x)
        assert sw.labels == ("b", "a")

    def test_arrays_are_read_only(self):
        pair = TimeSeriesPair(np.arange(6.0), np.arange(6.0))
        with pytest.raises(ValueError):
            pair.x[0] = 99.0


class TestChangePointSet:
    def test_windows_and_lengths(self):
        s = ChangePointSet((1, 4, 7, 11))
        assert s.n_windows == 3
        assert s.n_steps == 10
        assert s.windows() == [(1, 4), (4, 7), (7, 11)]
        assert list(s.window_lengths) == [3, 3, 4]

    def test_rejects_non_increasing(self):
        with pytest.raises(NotIncreasing):
            ChangePointSet((1, 5, 5, 9))

    def test_rejects_wrong_start(self):
        with pytest.raises(EndpointMismatch):
            ChangePointSet((2, 5, 9))

    def test_validate_endpoint(self):
        with pytest.raises(EndpointMismatch):
            validate_changepoints([1, 50, 100], T=100, l0=10)

    def test_validate_min_window(self):
        with pytest.raises(WindowTooShort):
            validate_changepoints([1, 5, 101], T=100, l0=10)
        s = validate_changepoints([1, 11, 101], T=100, l0=10)
        assert s.points == (1, 11, 101)


class TestRefinement:
    def test_subset_is_refinement(self):
        coarse = ChangePointSet((1, 41, 101))
        fine = ChangePointSet((1, 21, 41, 61, 101))
        assert refinement_of(fine, coarse)
        assert not refinement_of(coarse, fine)

    def test_mismatched_records_rejected(self):
        with pytest.raises(LengthMismatch):
            refinement_of(ChangePointSet((1, 101)), ChangePointSet((1, 51)))


class TestGcEstimate:
    def test_small_negative_clamped_to_zero(self):
        est = GcEstimate(-1e-13, GcKind.CLASSIC, Direction.X_TO_Y)
        assert est.value == 0.0

    def test_large_negative_rejected(self):
        with pytest.raises(InvalidConfig):
            GcEstimate(-1e-6, GcKind.CLASSIC, Direction.X_TO_Y)

    def test_dkf_kind_has_looser_tolerance(self):
        est = GcEstimate(-1e-10, GcKind.DKF, Direction.X_TO_Y)
        assert est.value == 0.0

    def test_p_value_range_checked(self):
        with pytest.raises(InvalidConfig):
            GcEstimate(0.1, GcKind.CLASSIC, Direction.X_TO_Y, p_value=1.5)


class TestCoefficientSchedule:
    def test_lengths_must_agree(self):
        with pytest.raises(LengthMismatch):
            CoefficientSchedule(np.zeros(5), np.zeros(5), np.ones(4))

    def test_sigma2_positive(self):
        with pytest.raises(InvalidConfig):
            CoefficientSchedule(np.zeros(5), np.zeros(5), np.zeros(5))

    def test_n_steps(self):
        sched = CoefficientSchedule(np.zeros(7), np.zeros(7), np.ones(7))
        assert sched.n_steps == 7
