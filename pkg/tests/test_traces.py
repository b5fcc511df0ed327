from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiercut.traces import TraceSeries, transfer_time


def test_step_semantics_value_holds_until_next_point():
    trace = TraceSeries(((0.0, 10.0), (5.0, 50.0)))
    assert trace.value_at(0.0) == 10.0
    assert trace.value_at(4.999) == 10.0
    assert trace.value_at(5.0) == 50.0
    assert trace.value_at(1e9) == 50.0  # last value holds forever


def test_value_before_first_breakpoint_uses_first_value():
    trace = TraceSeries(((10.0, 3.0),))
    assert trace.value_at(0.0) == 3.0


def test_breakpoint_times_must_increase():
    with pytest.raises(ValueError):
        TraceSeries(((0.0, 1.0), (0.0, 2.0)))


def test_negative_values_rejected():
    with pytest.raises(ValueError):
        TraceSeries(((0.0, -1.0),))


def test_transfer_time_piecewise_example():
    # 50 Mbit in the first 5 s, the remaining 50 at 50 Mbit/s
    trace = TraceSeries(((0.0, 10.0), (5.0, 50.0)))
    assert transfer_time(100.0, trace, 0.0) == pytest.approx(6.0, abs=1e-12)


def test_transfer_time_zero_size():
    assert transfer_time(0.0, TraceSeries.constant(10.0), 3.0) == 0.0


def test_transfer_time_calibrated_uploads():
    size = 15722.0
    wl = transfer_time(size, TraceSeries.constant(28.43), 0.0)
    az = transfer_time(size, TraceSeries.constant(4.006), 0.0)
    assert wl == pytest.approx(553.0, rel=0.01)
    assert az == pytest.approx(3925.0, rel=0.01)


def test_transfer_time_respects_start_offset():
    trace = TraceSeries(((0.0, 10.0), (5.0, 50.0)))
    # starting at the fast segment: 100 Mbit / 50 Mbit/s
    assert transfer_time(100.0, trace, 5.0) == pytest.approx(2.0, abs=1e-12)


def test_dead_link_is_floored_not_infinite():
    t = transfer_time(1.0, TraceSeries.constant(0.0), 0.0)
    assert t == pytest.approx(1.0 / 1e-6)


@st.composite
def step_traces(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    times = sorted(draw(st.lists(
        st.floats(min_value=0.0, max_value=50.0, allow_nan=False),
        min_size=n, max_size=n, unique=True,
    )))
    values = draw(st.lists(
        st.floats(min_value=0.1, max_value=100.0, allow_nan=False),
        min_size=n, max_size=n,
    ))
    return TraceSeries(tuple(zip(times, values)))


def _integrate_floored(trace: TraceSeries, a: float, b: float) -> float:
    """Exact integral of the floored step function over [a, b]."""
    cuts = [a] + [t for t, _ in trace.points if a < t < b] + [b]
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        total += max(trace.value_at(lo), 1e-6) * (hi - lo)
    return total


@settings(max_examples=60, deadline=None)
@given(trace=step_traces(), size=st.floats(min_value=0.01, max_value=500.0))
def test_transfer_time_matches_exact_integration(trace, size):
    t = transfer_time(size, trace, 0.0)
    assert _integrate_floored(trace, 0.0, t) == pytest.approx(size, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(trace=step_traces(), s1=st.floats(min_value=0.01, max_value=100.0),
       s2=st.floats(min_value=0.01, max_value=100.0))
def test_transfer_time_monotone_in_size(trace, s1, s2):
    lo, hi = min(s1, s2), max(s1, s2)
    assert transfer_time(lo, trace, 0.0) <= transfer_time(hi, trace, 0.0) + 1e-12
