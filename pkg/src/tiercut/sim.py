"""Deterministic discrete-event simulator for placed pipelines.

One simulation is one logical thread over a single event queue ordered
by (time, priority class, sequence number), so identical inputs replay
identically. Links carry transfers under processor sharing with
time-varying bandwidth (every trace breakpoint is an event, so bandwidth
is constant between the events that touch a link). Nodes run stages
FIFO within a vCPU capacity. The scheduling loop, monitor probes and
proxy synchronization all ride the same clock.

Work units are created by workload generators (periodic frame sources,
one-shot file uploads). A unit's pipeline latency runs from the moment
its data reaches the first vertex (file uploads pay an ingest transfer
first) to the completion of the last stage, and units in flight keep the
placement they started under.
"""

from __future__ import annotations

import heapq
import io
import csv
from dataclasses import dataclass, field

from .model import ApplicationGraph, Placement, TierChain
from .monitor import MonitorState
from .partition import ProxyRule
from .perf import BANDWIDTH_FLOOR_MBPS, NetworkState
from .scenario import FrameSource, FileUpload, Scenario
from .scheduling import (
    DeployRequest,
    ManagedApp,
    Scheduler,
    SchedulerEvent,
    ZoneRegistry,
    handle_deploy_request,
)
from .traces import TraceSeries

# Event priority classes: collisions at one timestamp resolve in this order.
_P_TRACE, _P_PROBE, _P_TICK, _P_ACTIVATE, _P_SYNC, _P_EMIT, _P_FLOW = range(7)

_DONE_EPS = 1e-12


@dataclass
class WorkUnit:
    uid: int
    pipeline_id: str
    emitted_s: float
    received_s: float | None = None
    completed_s: float | None = None
    stage_done_s: list[float] = field(default_factory=list)
    placement_tag: str = ""

    @property
    def latency_s(self) -> float | None:
        if self.completed_s is None or self.received_s is None:
            return None
        return self.completed_s - self.received_s


@dataclass
class _Transfer:
    seq: int
    label: str
    direction: str  # "up" | "down"
    size_mbit: float
    remaining_mbit: float
    done: object  # zero-arg callable


class _Flow:
    """One direction of one adjacent tier pair; processor sharing."""

    def __init__(self, sim: "Simulation", lo: str, hi: str, direction: str, trace: TraceSeries):
        self.sim = sim
        self.lo = lo
        self.hi = hi
        self.direction = direction
        self.trace = trace
        self.active: list[_Transfer] = []
        self.last_t = 0.0
        self.version = 0
        self.expected: _Transfer | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.lo, self.hi, self.direction)

    def bandwidth(self, t: float) -> float:
        return max(self.trace.value_at(t), BANDWIDTH_FLOOR_MBPS)

    def _advance(self, now: float) -> None:
        if self.active and now > self.last_t:
            rate = self.bandwidth(self.last_t) / len(self.active)
            span = now - self.last_t
            for tr in self.active:
                tr.remaining_mbit = max(tr.remaining_mbit - rate * span, 0.0)
        self.last_t = now

    def _reschedule(self, now: float) -> None:
        self.version += 1
        self.expected = None
        if not self.active:
            return
        rate = self.bandwidth(now) / len(self.active)
        self.expected = min(self.active, key=lambda tr: (tr.remaining_mbit, tr.seq))
        eta = self.expected.remaining_mbit / rate
        self.sim._push(now + eta, _P_FLOW, ("flow", self.key, self.version))

    def add(self, now: float, transfer: _Transfer) -> None:
        self._advance(now)
        self.active.append(transfer)
        self._reschedule(now)

    def on_flow_event(self, now: float, version: int) -> None:
        if version != self.version:
            return  # superseded by a later membership or bandwidth change
        self._advance(now)
        # Membership and bandwidth were untouched since this event was
        # scheduled (version matched), so the transfer it targets is due
        # now even if float rounding left a dust remainder behind.
        if self.expected is not None:
            self.expected.remaining_mbit = 0.0
        finished = [tr for tr in self.active if tr.remaining_mbit <= _DONE_EPS]
        for tr in finished:
            self.active.remove(tr)
            self.sim._transfer_completed(now, self, tr)
        self._reschedule(now)

    def on_trace_point(self, now: float) -> None:
        self._advance(now)
        self._reschedule(now)


class _Node:
    """Per-tier execution: FIFO admission within a vCPU capacity."""

    def __init__(self, sim: "Simulation", tier_id: str, capacity: float):
        self.sim = sim
        self.tier_id = tier_id
        self.capacity = capacity
        self.used = 0.0
        self.waiting: list[tuple[float, float, object]] = []  # (vcpus, duration, done)

    def submit(self, now: float, vcpus: float, duration: float, done) -> None:
        self.waiting.append((vcpus, duration, done))
        self._drain(now)

    def _drain(self, now: float) -> None:
        while self.waiting:
            vcpus, duration, done = self.waiting[0]
            if self.used + vcpus > self.capacity + _DONE_EPS:
                return
            self.waiting.pop(0)
            self.used += vcpus
            self.sim._push(now + duration, _P_FLOW, ("stage", self.tier_id, vcpus, done))

    def on_stage_done(self, now: float, vcpus: float, done) -> None:
        self.used -= vcpus
        done()
        self._drain(now)


@dataclass
class _ProxyRuntime:
    rule: ProxyRule
    proxy_tier: str
    master_tier: str
    batching: bool
    pending: list[int] = field(default_factory=list)
    in_flight: bool = False
    emitted: list[int] = field(default_factory=list)
    master: list[int] = field(default_factory=list)
    next_record: int = 0
    wan_mbit: float = 0.0


@dataclass
class PipelineStats:
    pipeline_id: str
    units_completed: int
    p50_ms: float
    p95_ms: float
    max_ms: float
    violation_s: float
    constraint_s: float


@dataclass
class SimResults:
    duration_s: float
    seed: int
    dynamic: bool
    units: list[WorkUnit]
    events: list[SchedulerEvent]
    latency_rows: list[tuple]
    link_rows: list[tuple]
    metric_rows: list[tuple]
    byte_counters: dict[tuple[str, str, str], float]
    proxies: dict[str, _ProxyRuntime]
    remap_count: int
    units_emitted: int
    final_placement: Placement | None
    final_app: ApplicationGraph | None

    def units_in_flight(self) -> int:
        return self.units_emitted - sum(1 for u in self.units if u.completed_s is not None)

    def pipeline_stats(self, app: ApplicationGraph) -> list[PipelineStats]:
        out = []
        for pipe in app.pipelines:
            lats = sorted(
                u.latency_s for u in self.units
                if u.pipeline_id == pipe.id and u.latency_s is not None
            )
            if not lats:
                out.append(PipelineStats(pipe.id, 0, 0.0, 0.0, 0.0, 0.0,
                                         pipe.latency_constraint_s))
                continue
            intervals = []
            for u in self.units:
                if u.pipeline_id != pipe.id or u.latency_s is None:
                    continue
                if u.latency_s > pipe.latency_constraint_s:
                    intervals.append(
                        (u.received_s + pipe.latency_constraint_s, u.completed_s)
                    )
            out.append(
                PipelineStats(
                    pipeline_id=pipe.id,
                    units_completed=len(lats),
                    p50_ms=_nearest_rank(lats, 0.50) * 1000.0,
                    p95_ms=_nearest_rank(lats, 0.95) * 1000.0,
                    max_ms=lats[-1] * 1000.0,
                    violation_s=_merged_length(intervals),
                    constraint_s=pipe.latency_constraint_s,
                )
            )
        return out

    def sync_wan_mbit(self) -> float:
        return sum(p.wan_mbit for p in self.proxies.values())


def _nearest_rank(sorted_values: list[float], q: float) -> float:
    import math

    idx = max(math.ceil(q * len(sorted_values)) - 1, 0)
    return sorted_values[idx]


def _merged_length(intervals: list[tuple[float, float]]) -> float:
    if not intervals:
        return 0.0
    intervals = sorted(intervals)
    total = 0.0
    cur_a, cur_b = intervals[0]
    for a, b in intervals[1:]:
        if a > cur_b:
            total += cur_b - cur_a
            cur_a, cur_b = a, b
        else:
            cur_b = max(cur_b, b)
    total += max(cur_b - cur_a, 0.0)
    return total


class Simulation:
    def __init__(self, scenario: Scenario, duration_s: float, seed: int = 0,
                 dynamic: bool = True, collect_metrics: bool = False):
        if scenario.app is None or scenario.tiers is None or scenario.net is None:
            raise ValueError("scenario must declare tiers, network and application")
        self.scenario = scenario
        self.duration_s = duration_s
        self.seed = seed
        self.dynamic = dynamic
        self.collect_metrics = collect_metrics

        self.now = 0.0
        self._heap: list[tuple] = []
        self._seq = 0

        self.tiers: TierChain = scenario.tiers
        self.base_net: NetworkState = scenario.net
        self.flows: dict[tuple[str, str, str], _Flow] = {}
        self.nodes: dict[str, _Node] = {}
        self.units: list[WorkUnit] = []
        self.units_emitted = 0
        self.events: list[SchedulerEvent] = []
        self.latency_rows: list[tuple] = []
        self.link_rows: list[tuple] = []
        self.metric_rows: list[tuple] = []
        self.byte_counters: dict[tuple[str, str, str], float] = {}
        self.proxies: dict[str, _ProxyRuntime] = {}
        self.remap_count = 0

        cfg = scenario.scheduler_config
        self.monitor = MonitorState(
            alpha=cfg.ewma_alpha,
            heartbeat_period_s=cfg.report_period_s,
            baseline_bandwidth=self._baseline_bandwidth(),
            baseline_rtt={(p.lo, p.hi): p.rtt_s for p in self.base_net.pairs},
        )
        self.managed = ManagedApp(
            app=scenario.app,
            proxy_sync=scenario.proxy_sync,
        )
        self.scheduler = Scheduler(
            apps=[self.managed],
            tiers=self.tiers,
            base_net=self.base_net,
            weights=scenario.weights,
            config=cfg,
            orchestration=_SimOrchestration(self),
            dynamic=dynamic,
        )
        # (app, placement) in force; units capture the pair at receipt
        self.active: tuple[ApplicationGraph, Placement] | None = None
        self._known_rules: set[str] = set()

        self._build_flows()
        self._build_nodes()

    # --- construction -------------------------------------------------

    def _baseline_bandwidth(self) -> dict[tuple[str, str, str], float]:
        out = {}
        for p in self.base_net.pairs:
            out[(p.lo, p.hi, "up")] = p.bw_up_mbps
            out[(p.lo, p.hi, "down")] = p.bw_down_mbps
        return out

    def _build_flows(self) -> None:
        traced: dict[tuple[str, str, str], TraceSeries] = {}
        for t in self.scenario.bandwidth_traces:
            traced[(t.lo, t.hi, t.direction)] = t.series
        for p in self.base_net.pairs:
            for direction, base in (("up", p.bw_up_mbps), ("down", p.bw_down_mbps)):
                key = (p.lo, p.hi, direction)
                series = traced.get(key, TraceSeries.constant(base))
                flow = _Flow(self, p.lo, p.hi, direction, series)
                self.flows[key] = flow
                self.byte_counters[key] = 0.0

    def _build_nodes(self) -> None:
        for tier in self.tiers:
            self.nodes[tier.id] = _Node(self, tier.id, tier.vcpus)

    # --- event plumbing -------------------------------------------------

    def _push(self, time_s: float, priority: int, payload: tuple) -> None:
        self._seq += 1
        heapq.heappush(self._heap, (time_s, priority, self._seq, payload))

    def run(self) -> SimResults:
        if self.duration_s <= 0:
            return self._results()  # null run: nothing happens, files stay empty
        self._schedule_traces()
        self._schedule_probes(0.0)
        self._process_requests()
        self._schedule_tick(0.0)
        self._schedule_workloads()

        while self._heap:
            time_s, _prio, _seq, payload = heapq.heappop(self._heap)
            if time_s > self.duration_s:
                break
            self.now = time_s
            self._dispatch(payload)
        return self._results()

    def _results(self) -> SimResults:
        return SimResults(
            duration_s=self.duration_s,
            seed=self.seed,
            dynamic=self.dynamic,
            units=self.units,
            events=self.events,
            latency_rows=self.latency_rows,
            link_rows=self.link_rows,
            metric_rows=self.metric_rows,
            byte_counters=self.byte_counters,
            proxies=self.proxies,
            remap_count=self.remap_count,
            units_emitted=self.units_emitted,
            final_placement=self.active[1] if self.active else None,
            final_app=self.active[0] if self.active else None,
        )

    def _dispatch(self, payload: tuple) -> None:
        kind = payload[0]
        if kind == "flow":
            _, key, version = payload
            self.flows[key].on_flow_event(self.now, version)
        elif kind == "stage":
            _, tier_id, vcpus, done = payload
            self.nodes[tier_id].on_stage_done(self.now, vcpus, done)
        elif kind == "trace":
            _, key = payload
            self.flows[key].on_trace_point(self.now)
        elif kind == "probe":
            self._on_probe()
        elif kind == "tick":
            self._on_tick()
        elif kind == "activate":
            _, app, placement = payload
            self.active = (app, placement)
        elif kind == "emit-frame":
            _, source, index = payload
            self._emit_frame(source, index)
        elif kind == "emit-file":
            _, upload = payload
            self._emit_file(upload)
        elif kind == "sync":
            _, proxy_id = payload
            self._on_sync(proxy_id)
        else:  # pragma: no cover
            raise RuntimeError(f"unknown event {kind!r}")

    # --- periodic machinery ---------------------------------------------

    def _schedule_traces(self) -> None:
        for t in self.scenario.bandwidth_traces:
            key = (t.lo, t.hi, t.direction)
            for bt in t.series.breakpoints_after(0.0):
                if bt <= self.duration_s:
                    self._push(bt, _P_TRACE, ("trace", key))

    def _schedule_probes(self, t: float) -> None:
        if t > self.duration_s:
            return
        self._push(t, _P_PROBE, ("probe",))

    def _on_probe(self) -> None:
        for key in sorted(self.flows):
            flow = self.flows[key]
            sample = flow.bandwidth(self.now)
            self.monitor.observe_bandwidth(flow.lo, flow.hi, flow.direction, sample)
            if self.collect_metrics:
                self.metric_rows.append(
                    (self.now, "bandwidth_mbps", f"{flow.lo}->{flow.hi}:{flow.direction}", sample)
                )
        for ht in self.scenario.health_traces:
            if ht.series.value_at(self.now) > 0:
                self.monitor.heartbeat(ht.zone, self.now)
        self._schedule_probes(self.now + self.scenario.scheduler_config.report_period_s)

    def _schedule_tick(self, t: float) -> None:
        if t > self.duration_s:
            return
        self._push(t, _P_TICK, ("tick",))

    def _on_tick(self) -> None:
        snapshot = self.monitor.snapshot(self.now)
        events = self.scheduler.tick(self.now, snapshot)
        for ev in events:
            self.events.append(ev)
            if ev.event_type == "remap":
                self.remap_count += 1
        self._adopt_new_proxies()
        # dynamic OFF still needs ticks until the initial mapping lands
        if self.dynamic or not self.managed.scheduled:
            self._schedule_tick(self.now + self.scenario.scheduler_config.interval_s)

    def _adopt_new_proxies(self) -> None:
        for rule in self.managed.proxy_rules:
            if rule.proxy in self._known_rules:
                continue
            self._known_rules.add(rule.proxy)
            placement = self.managed.placement
            runtime = _ProxyRuntime(
                rule=rule,
                proxy_tier=placement.tier_of(rule.proxy),
                master_tier=placement.tier_of(rule.target),
                batching=self.scenario.proxy_sync.batching,
            )
            self.proxies[rule.proxy] = runtime
            self._push(self.now + rule.sync_interval_s, _P_SYNC, ("sync", rule.proxy))

    # --- workloads -------------------------------------------------------

    def _schedule_workloads(self) -> None:
        for source in self.scenario.frame_sources:
            if source.start_s <= self.duration_s:
                self._push(source.start_s, _P_EMIT, ("emit-frame", source, 0))
        for upload in self.scenario.file_uploads:
            if upload.start_s <= self.duration_s:
                self._push(upload.start_s, _P_EMIT, ("emit-file", upload))

    def _emit_frame(self, source: FrameSource, index: int) -> None:
        self._spawn_unit(source.pipeline, ingest_mbit=source.ingest_mbit,
                         from_tier=source.from_tier)
        nxt = index + 1
        if source.count is None or nxt < source.count:
            t = source.start_s + nxt * source.period_s
            if t <= self.duration_s:
                self._push(t, _P_EMIT, ("emit-frame", source, nxt))

    def _emit_file(self, upload: FileUpload) -> None:
        self._spawn_unit(upload.pipeline, ingest_mbit=upload.size_mbit,
                         from_tier=upload.from_tier)

    def _spawn_unit(self, pipeline_id: str, ingest_mbit: float, from_tier: str | None) -> None:
        self.units_emitted += 1
        unit = WorkUnit(uid=self.units_emitted, pipeline_id=pipeline_id, emitted_s=self.now)
        self.units.append(unit)
        if self.active is None:
            return  # never scheduled; the unit stays in flight
        app, placement = self.active
        pipe = app.pipeline(pipeline_id)
        unit.placement_tag = placement.tag(pipe.path)
        first_tier = placement.tier_of(pipe.path[0])

        def start_pipeline() -> None:
            unit.received_s = self.now
            self._run_stage(unit, app, placement, pipe, 0)

        if ingest_mbit > 0 and from_tier is not None and from_tier != first_tier:
            self._send(
                ingest_mbit, 0.0, from_tier, first_tier,
                label=f"ingest:{pipeline_id}", then=start_pipeline,
            )
        else:
            start_pipeline()

    # --- pipeline execution ----------------------------------------------

    def _run_stage(self, unit: WorkUnit, app: ApplicationGraph, placement: Placement,
                   pipe, index: int) -> None:
        ms = app.microservice(pipe.path[index])
        tier_id = placement.tier_of(ms.id)
        duration = ms.time_at(tier_id)

        def stage_finished() -> None:
            unit.stage_done_s.append(self.now)
            self.monitor.observe_service_time(ms.id, tier_id, max(duration, 1e-12))
            if ms.id in self.proxies:
                self._record_alert(self.proxies[ms.id])
            if index + 1 < len(pipe.path):
                self._hop(unit, app, placement, pipe, index)
            else:
                unit.completed_s = self.now
                self.latency_rows.append(
                    (self.now, unit.uid, unit.pipeline_id,
                     (self.now - unit.received_s) * 1000.0, unit.placement_tag)
                )

        self.nodes[tier_id].submit(self.now, ms.vcpus, duration, stage_finished)

    def _hop(self, unit: WorkUnit, app: ApplicationGraph, placement: Placement,
             pipe, index: int) -> None:
        src = pipe.path[index]
        dst = pipe.path[index + 1]
        link = app.link(src, dst)
        src_tier = placement.tier_of(src)
        dst_tier = placement.tier_of(dst)

        def next_stage() -> None:
            self._run_stage(unit, app, placement, pipe, index + 1)

        if src_tier == dst_tier:
            next_stage()
            return

        def after_transfer() -> None:
            self.monitor.observe_data(src, dst, "in", max(link.data_in_mbit, 1e-12))
            next_stage()

        self._send(
            link.data_in_mbit, link.data_out_mbit, src_tier, dst_tier,
            label=f"{src}->{dst}", then=after_transfer,
        )

    def _send(self, data_in: float, data_out: float, tier_a: str, tier_b: str,
              label: str, then) -> None:
        """data_in over the up direction of every hop between the tiers,
        then data_out back over the down direction, then the callback."""
        lo = min(self.tiers.rank_of(tier_a), self.tiers.rank_of(tier_b))
        hi = max(self.tiers.rank_of(tier_a), self.tiers.rank_of(tier_b))
        segments: list[tuple[tuple[str, str, str], float]] = []
        for r in range(lo, hi):
            pair = (self.tiers.tiers[r].id, self.tiers.tiers[r + 1].id)
            if data_in > 0:
                segments.append(((pair[0], pair[1], "up"), data_in))
        for r in range(hi - 1, lo - 1, -1):
            pair = (self.tiers.tiers[r].id, self.tiers.tiers[r + 1].id)
            if data_out > 0:
                segments.append(((pair[0], pair[1], "down"), data_out))

        def launch(i: int) -> None:
            if i == len(segments):
                then()
                return
            key, size = segments[i]
            self._seq += 1
            transfer = _Transfer(
                seq=self._seq, label=label, direction=key[2],
                size_mbit=size, remaining_mbit=size,
                done=lambda: launch(i + 1),
            )
            self.flows[key].add(self.now, transfer)

        launch(0)

    def _transfer_completed(self, now: float, flow: _Flow, transfer: _Transfer) -> None:
        self.byte_counters[flow.key] += transfer.size_mbit
        self.link_rows.append((now, transfer.label, flow.direction, transfer.size_mbit))
        transfer.done()

    # --- proxy sync --------------------------------------------------------

    def _record_alert(self, runtime: _ProxyRuntime) -> None:
        runtime.next_record += 1
        runtime.emitted.append(runtime.next_record)
        runtime.pending.append(runtime.next_record)

    def _on_sync(self, proxy_id: str) -> None:
        runtime = self.proxies[proxy_id]
        rule = runtime.rule
        if runtime.batching:
            if runtime.pending and not runtime.in_flight:
                batch = runtime.pending[: rule.batch_size]
                del runtime.pending[: len(batch)]
                size = rule.record_mbit * len(batch) + rule.overhead_mbit
                runtime.in_flight = True
                runtime.wan_mbit += size

                def delivered(records=tuple(batch)) -> None:
                    runtime.master.extend(records)
                    runtime.in_flight = False

                self._send(size, 0.0, runtime.proxy_tier, runtime.master_tier,
                           label=f"sync:{proxy_id}", then=delivered)
        else:
            drained = list(runtime.pending)
            runtime.pending.clear()
            for record in drained:
                size = rule.record_mbit + rule.overhead_mbit
                runtime.wan_mbit += size

                def delivered(rec=record) -> None:
                    runtime.master.append(rec)

                self._send(size, 0.0, runtime.proxy_tier, runtime.master_tier,
                           label=f"sync:{proxy_id}", then=delivered)
        nxt = self.now + rule.sync_interval_s
        if nxt <= self.duration_s:
            self._push(nxt, _P_SYNC, ("sync", proxy_id))

    # --- deploy requests ---------------------------------------------------

    def _process_requests(self) -> None:
        if not self.scenario.requests:
            return
        registry = ZoneRegistry()
        for req in self.scenario.requests:
            demand = sum(ms.vcpus for ms in self.scenario.app.microservices)
            outcome = handle_deploy_request(
                DeployRequest(region=req.region, app=req.app, vcpus_demand=demand),
                registry,
            )
            self.events.extend(outcome.events)


class _SimOrchestration:
    def __init__(self, sim: Simulation):
        self.sim = sim

    def free_vcpus(self, tier_id: str) -> float:
        capacity = self.sim.tiers.by_id(tier_id).vcpus
        if self.sim.active is None:
            return capacity
        app, placement = self.sim.active
        reserved = sum(
            ms.vcpus for ms in app.microservices if placement.tier_of(ms.id) == tier_id
        )
        return capacity - reserved

    def activate(self, app_name: str, placement: Placement, effective_s: float) -> None:
        sim = self.sim
        app = sim.managed.active_app
        if effective_s <= sim.now:
            sim.active = (app, placement)
        else:
            sim._push(effective_s, _P_ACTIVATE, ("activate", app, placement))


# --- CSV rendering -----------------------------------------------------------


def latency_csv(results: SimResults) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_s", "unit_id", "pipeline", "latency_ms", "placement_tag"])
    for t, uid, pipe, ms, tag in results.latency_rows:
        w.writerow([f"{t:.6f}", uid, pipe, f"{ms:.6f}", tag])
    return buf.getvalue()


def links_csv(results: SimResults) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_s", "link", "direction", "mbit_transferred"])
    for t, label, direction, mbit in results.link_rows:
        w.writerow([f"{t:.6f}", label, direction, f"{mbit:.6f}"])
    return buf.getvalue()


def events_csv(results: SimResults) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time_s", "app", "event_type", "detail"])
    for ev in results.events:
        w.writerow([f"{ev.time_s:.6f}", ev.app, ev.event_type, ev.detail])
    return buf.getvalue()


def metrics_csv(results: SimResults) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time_s", "metric", "key", "value"])
    for t, metric, key, value in results.metric_rows:
        w.writerow([f"{t:.6f}", metric, key, f"{value:.9g}"])
    return buf.getvalue()
