"""Wilson intervals, empirical CDFs, satisfaction predicates."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slicesim.metrics import (
    embb_satisfied,
    empirical_cdf,
    satisfaction_summary,
    wilson_interval,
    xr_satisfied,
)
from slicesim.reward import QosTargets


class TestWilson:
    def test_hand_example(self):
        lo, hi = wilson_interval(95, 100, z=1.96)
        assert lo == pytest.approx(0.8883, abs=1e-3)
        assert hi == pytest.approx(0.9785, abs=1e-3)

    def test_zero_successes(self):
        lo, hi = wilson_interval(0, 10)
        assert lo == 0.0
        assert 0.0 < hi < 1.0

    def test_all_successes(self):
        lo, hi = wilson_interval(10, 10)
        assert hi == 1.0
        assert 0.0 < lo < 1.0

    def test_empty_sample(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)

    def test_bad_successes(self):
        with pytest.raises(ValueError):
            wilson_interval(11, 10)

    @given(st.integers(0, 500), st.integers(1, 500))
    def test_contains_point_estimate(self, k, n):
        k = min(k, n)
        lo, hi = wilson_interval(k, n)
        assert 0.0 <= lo <= k / n <= hi <= 1.0


class TestEmpiricalCdf:
    def test_three_points(self):
        got = empirical_cdf([3, 1, 2])
        assert got == [(1, 1 / 3), (2, 2 / 3), (3, 1.0)]

    def test_duplicates_collapse(self):
        got = empirical_cdf([1.0, 1.0, 2.0])
        assert got == [(1.0, 2 / 3), (2.0, 1.0)]

    def test_single_value(self):
        assert empirical_cdf([7.5]) == [(7.5, 1.0)]

    def test_empty(self):
        assert empirical_cdf([]) == []

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=60))
    def test_monotone_and_terminates_at_one(self, values):
        got = empirical_cdf(values)
        ps = [p for _, p in got]
        xs = [x for x, _ in got]
        assert ps[-1] == 1.0
        assert all(a < b for a, b in zip(xs, xs[1:]))
        assert all(a <= b for a, b in zip(ps, ps[1:]))


class TestSatisfaction:
    def test_xr_all_targets_met(self):
        t = QosTargets()
        assert xr_satisfied(62e6, 0.0, 30.0, 5.0, t)

    def test_xr_sync_gap_violates(self):
        t = QosTargets()
        assert not xr_satisfied(62e6, 0.0, 51.0, 5.0, t)

    def test_xr_rate_violates(self):
        t = QosTargets()
        assert not xr_satisfied(59.9e6, 0.0, 30.0, 5.0, t)

    def test_xr_loss_violates(self):
        t = QosTargets()
        assert not xr_satisfied(62e6, 1e-3, 30.0, 5.0, t)

    def test_xr_haptic_delay_violates(self):
        t = QosTargets()
        assert not xr_satisfied(62e6, 0.0, 30.0, 10.1, t)

    def test_embb_boundary(self):
        t = QosTargets()
        assert embb_satisfied(45e6, t)
        assert not embb_satisfied(44.9e6, t)

    def test_summary_counts(self):
        rows = [{"satisfied": 1}] * 3 + [{"satisfied": 0}]
        s = satisfaction_summary(rows)
        assert s["ratio"] == 0.75
        assert s["n"] == 4
        assert s["wilson_lo"] <= 0.75 <= s["wilson_hi"]

    def test_summary_empty(self):
        s = satisfaction_summary([])
        assert s == {"ratio": 0.0, "wilson_lo": 0.0, "wilson_hi": 1.0, "n": 0}
