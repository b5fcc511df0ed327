from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiercut.monitor import EwmaEstimator, MonitorState, observe


def test_observe_blend_example():
    est = EwmaEstimator(alpha=0.3, estimate=100.0, samples=1)
    assert observe(est, 50.0).estimate == pytest.approx(85.0, abs=1e-12)


def test_first_sample_becomes_the_estimate():
    est = observe(EwmaEstimator(alpha=0.3), 42.0)
    assert est.estimate == 42.0
    assert est.samples == 1


def test_constant_samples_are_a_fixed_point():
    est = EwmaEstimator(alpha=0.3)
    for _ in range(50):
        est = observe(est, 35.47)
    assert est.estimate == pytest.approx(35.47, rel=1e-12)


def test_non_positive_samples_rejected():
    with pytest.raises(ValueError):
        observe(EwmaEstimator(alpha=0.3), 0.0)
    with pytest.raises(ValueError):
        observe(EwmaEstimator(alpha=0.3), -1.0)


def test_alpha_must_be_in_unit_interval():
    with pytest.raises(ValueError):
        EwmaEstimator(alpha=0.0)
    with pytest.raises(ValueError):
        EwmaEstimator(alpha=1.5)


@settings(max_examples=80, deadline=None)
@given(
    alpha=st.floats(min_value=0.01, max_value=1.0),
    samples=st.lists(st.floats(min_value=0.001, max_value=1e6), min_size=1, max_size=30),
)
def test_estimate_stays_within_sample_range(alpha, samples):
    est = EwmaEstimator(alpha=alpha)
    for s in samples:
        est = observe(est, s)
    assert min(samples) - 1e-9 <= est.estimate <= max(samples) + 1e-9


def test_snapshot_falls_back_to_baseline_before_any_observation():
    state = MonitorState(
        baseline_bandwidth={("w", "a", "up"): 35.47},
        baseline_service={("FD", "w"): 0.03},
    )
    snap = state.snapshot(0.0)
    assert snap.bandwidth_mbps[("w", "a", "up")] == 35.47
    assert snap.service_time_s[("FD", "w")] == 0.03


def test_snapshot_reflects_observations():
    state = MonitorState(baseline_bandwidth={("w", "a", "up"): 35.47})
    for _ in range(30):
        state.observe_bandwidth("w", "a", "up", 35.47)
    snap = state.snapshot(30.0)
    assert snap.bandwidth_mbps[("w", "a", "up")] == pytest.approx(35.47, rel=1e-9)


def test_snapshot_is_reproducible():
    def build():
        state = MonitorState()
        for v in (10.0, 20.0, 15.0):
            state.observe_bandwidth("w", "a", "up", v)
            state.observe_service_time("FD", "w", v / 100)
        return state.snapshot(3.0)

    assert build() == build()


def test_zone_goes_stale_after_three_missed_periods():
    state = MonitorState(heartbeat_period_s=1.0)
    state.heartbeat("edge-1", 0.0)
    assert not state.snapshot(3.0).zone_stale("edge-1")
    assert state.snapshot(3.5).zone_stale("edge-1")
    assert state.snapshot(10.0).zone_stale("edge-1")


def test_stale_flag_clears_only_with_fresh_heartbeat():
    state = MonitorState(heartbeat_period_s=1.0)
    state.heartbeat("edge-1", 0.0)
    assert state.snapshot(10.0).zone_stale("edge-1")
    assert state.snapshot(20.0).zone_stale("edge-1")  # never self-heals
    state.heartbeat("edge-1", 21.0)
    assert not state.snapshot(21.5).zone_stale("edge-1")


def test_heartbeats_must_not_go_backwards():
    state = MonitorState()
    state.heartbeat("edge-1", 5.0)
    with pytest.raises(ValueError):
        state.heartbeat("edge-1", 4.0)
