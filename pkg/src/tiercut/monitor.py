"""Turns raw observations into the parameter snapshots the scheduler consumes.

The monitor keeps one exponentially weighted moving average per metric:
per-microservice-per-tier service time and per-link data volume on the
application side, per tier-pair-per-direction bandwidth on the network
side. Anything never observed falls back to the scenario baseline. Zone
heartbeats age into a staleness flag after three missed periods.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

STALE_AFTER_PERIODS = 3.0


@dataclass(frozen=True)
class EwmaEstimator:
    """estimate' = alpha * sample + (1 - alpha) * estimate; first sample wins whole."""

    alpha: float = 0.3
    estimate: float | None = None
    samples: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must be in (0, 1]")


def observe(est: EwmaEstimator, sample: float) -> EwmaEstimator:
    if sample <= 0:
        raise ValueError(f"samples must be positive, got {sample}")
    if est.estimate is None:
        return replace(est, estimate=sample, samples=1)
    return replace(
        est,
        estimate=est.alpha * sample + (1.0 - est.alpha) * est.estimate,
        samples=est.samples + 1,
    )


@dataclass(frozen=True)
class ZoneHealth:
    zone: str
    stale: bool
    age_s: float


@dataclass(frozen=True)
class MetricsSnapshot:
    """Immutable freeze of every current estimate at one instant."""

    time_s: float
    bandwidth_mbps: dict[tuple[str, str, str], float]  # (lo, hi, "up"|"down") -> Mbit/s
    rtt_s: dict[tuple[str, str], float]
    service_time_s: dict[tuple[str, str], float]       # (microservice, tier) -> s
    data_mbit: dict[tuple[str, str, str], float]       # (src, dst, "in"|"out") -> Mbit
    zones: tuple[ZoneHealth, ...]

    def zone_stale(self, zone: str) -> bool:
        for z in self.zones:
            if z.zone == zone:
                return z.stale
        raise KeyError(zone)


class MonitorState:
    """Owned by the simulation loop; snapshots are safe to hand elsewhere."""

    def __init__(
        self,
        *,
        alpha: float = 0.3,
        heartbeat_period_s: float = 1.0,
        baseline_bandwidth: dict[tuple[str, str, str], float] | None = None,
        baseline_rtt: dict[tuple[str, str], float] | None = None,
        baseline_service: dict[tuple[str, str], float] | None = None,
        baseline_data: dict[tuple[str, str, str], float] | None = None,
    ) -> None:
        self.alpha = alpha
        self.heartbeat_period_s = heartbeat_period_s
        self._bandwidth: dict[tuple[str, str, str], EwmaEstimator] = {}
        self._service: dict[tuple[str, str], EwmaEstimator] = {}
        self._data: dict[tuple[str, str, str], EwmaEstimator] = {}
        self._heartbeat: dict[str, float] = {}
        self._baseline_bandwidth = dict(baseline_bandwidth or {})
        self._baseline_rtt = dict(baseline_rtt or {})
        self._baseline_service = dict(baseline_service or {})
        self._baseline_data = dict(baseline_data or {})

    def _observe_into(self, table: dict, key, sample: float) -> None:
        est = table.get(key, EwmaEstimator(alpha=self.alpha))
        table[key] = observe(est, sample)

    def observe_bandwidth(self, lo: str, hi: str, direction: str, mbps: float) -> None:
        self._observe_into(self._bandwidth, (lo, hi, direction), mbps)

    def observe_service_time(self, ms_id: str, tier_id: str, seconds: float) -> None:
        self._observe_into(self._service, (ms_id, tier_id), seconds)

    def observe_data(self, src: str, dst: str, direction: str, mbit: float) -> None:
        self._observe_into(self._data, (src, dst, direction), mbit)

    def heartbeat(self, zone: str, now_s: float) -> None:
        prev = self._heartbeat.get(zone)
        if prev is not None and now_s < prev:
            raise ValueError("heartbeat times must be non-decreasing")
        self._heartbeat[zone] = now_s

    def snapshot(self, now_s: float) -> MetricsSnapshot:
        bandwidth = dict(self._baseline_bandwidth)
        for key, est in self._bandwidth.items():
            bandwidth[key] = est.estimate
        service = dict(self._baseline_service)
        for key, est in self._service.items():
            service[key] = est.estimate
        data = dict(self._baseline_data)
        for key, est in self._data.items():
            data[key] = est.estimate
        zones = tuple(
            ZoneHealth(
                zone=z,
                stale=(now_s - beat) > STALE_AFTER_PERIODS * self.heartbeat_period_s,
                age_s=max(now_s - beat, 0.0),
            )
            for z, beat in sorted(self._heartbeat.items())
        )
        return MetricsSnapshot(
            time_s=now_s,
            bandwidth_mbps=bandwidth,
            rtt_s=dict(self._baseline_rtt),
            service_time_s=service,
            data_mbit=data,
            zones=zones,
        )
