"""Step-function time series for bandwidth and health replay."""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .perf import BANDWIDTH_FLOOR_MBPS


@dataclass(frozen=True)
class TraceSeries:
    """Breakpoints (time_s, value); each value holds until the next point.

    Before the first breakpoint the first value applies. A value of 0 is
    legal in the data and is floored at evaluation time so a dead link
    stays finite.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("trace needs at least one breakpoint")
        times = [t for t, _ in self.points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("trace breakpoint times must be strictly increasing")
        if any(v < 0 for _, v in self.points):
            raise ValueError("trace values must be >= 0")

    @classmethod
    def constant(cls, value: float) -> "TraceSeries":
        return cls(((0.0, value),))

    def value_at(self, t: float) -> float:
        times = [p[0] for p in self.points]
        i = bisect.bisect_right(times, t) - 1
        if i < 0:
            i = 0
        return self.points[i][1]

    def breakpoints_after(self, t: float) -> tuple[float, ...]:
        return tuple(bt for bt, _ in self.points if bt > t)


def transfer_time(size_mbit: float, trace: TraceSeries, start_s: float) -> float:
    """Seconds for a lone transfer: smallest t with integral of bandwidth
    over [start, start+t] equal to size.

    Bandwidth is the floored trace value, piecewise constant between
    breakpoints. Concurrent transfers are the simulator's business; this
    treats the link as dedicated.
    """
    if size_mbit < 0:
        raise ValueError("transfer size must be >= 0")
    if size_mbit == 0:
        return 0.0
    remaining = size_mbit
    now = start_s
    future = list(trace.breakpoints_after(start_s))
    while True:
        bw = max(trace.value_at(now), BANDWIDTH_FLOOR_MBPS)
        seg_end = future.pop(0) if future else None
        if seg_end is None:
            return now + remaining / bw - start_s
        span = seg_end - now
        if remaining <= bw * span:
            return now + remaining / bw - start_s
        remaining -= bw * span
        now = seg_end
