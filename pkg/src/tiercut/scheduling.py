"""Placement control loop and deployment bookkeeping.

The loop wakes every interval. Unscheduled applications get an initial
(static) placement; scheduled ones are re-checked against the latest
metrics snapshot and re-mapped when the current placement no longer
meets its budget, or when re-solving would save enough cost with margin
to spare. Infeasibility never crashes the loop: it is reported as a
developer notification event and the previous placement stays active.

The zone registry and the deploy-request handler model the multi-zone
bookkeeping of a central scheduler: reuse zones and VMs when present and
healthy, create records when absent, and refuse unreachable or unhealthy
infrastructure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Protocol

from .model import ApplicationGraph, Placement, TierChain
from .monitor import MetricsSnapshot
from .partition import (
    PartitionProblem,
    PartitionResult,
    ProxySyncConfig,
    insert_proxies,
    partition,
    partition_multi_tier,
)
from .perf import NetworkState, PricingWeights, TierPairLink, pipeline_latency, total_cost


@dataclass(frozen=True)
class SchedulerConfig:
    interval_s: float = 10.0
    hysteresis_margin: float = 0.1
    improvement_threshold: float = 0.2
    activation_delay_s: float = 0.0
    report_period_s: float = 1.0
    ewma_alpha: float = 0.3

    def __post_init__(self) -> None:
        if self.interval_s <= 0:
            raise ValueError("interval must be > 0")
        if not (0.0 <= self.hysteresis_margin < 1.0):
            raise ValueError("hysteresis margin must be in [0, 1)")
        if self.improvement_threshold < 0:
            raise ValueError("improvement threshold must be >= 0")
        if self.activation_delay_s < 0:
            raise ValueError("activation delay must be >= 0")


@dataclass(frozen=True)
class SchedulerEvent:
    time_s: float
    app: str
    event_type: str
    detail: str


@dataclass(frozen=True)
class Move:
    ms_id: str
    from_tier: str
    to_tier: str

    def __str__(self) -> str:
        return f"{self.ms_id}:{self.from_tier}->{self.to_tier}"


@dataclass(frozen=True)
class MigrationPlan:
    moves: tuple[Move, ...]
    effective_s: float
    rejected_reason: str | None = None

    @property
    def accepted(self) -> bool:
        return self.rejected_reason is None


class Orchestration(Protocol):
    """What the loop needs from whoever actually runs microservices."""

    def free_vcpus(self, tier_id: str) -> float: ...

    def activate(self, app: str, placement: Placement, effective_s: float) -> None: ...


class UnboundedOrchestration:
    """Accepts everything; useful for tests and capacity-free scenarios."""

    def free_vcpus(self, tier_id: str) -> float:
        return math.inf

    def activate(self, app: str, placement: Placement, effective_s: float) -> None:
        pass


def snapshot_network(
    tiers: TierChain, base: NetworkState, snapshot: MetricsSnapshot
) -> NetworkState:
    """Network state with every estimate the snapshot carries applied."""
    pairs = []
    for p in base.pairs:
        up = snapshot.bandwidth_mbps.get((p.lo, p.hi, "up"), p.bw_up_mbps)
        down = snapshot.bandwidth_mbps.get((p.lo, p.hi, "down"), p.bw_down_mbps)
        rtt = snapshot.rtt_s.get((p.lo, p.hi), p.rtt_s)
        pairs.append(TierPairLink(p.lo, p.hi, up, down, rtt))
    return NetworkState(tuple(pairs))


def snapshot_application(app: ApplicationGraph, snapshot: MetricsSnapshot) -> ApplicationGraph:
    """Application with monitored service times and data volumes applied."""
    new_ms = []
    for ms in app.microservices:
        times = dict(ms.service_time_s)
        for tier_id in times:
            est = snapshot.service_time_s.get((ms.id, tier_id))
            if est is not None:
                times[tier_id] = est
        new_ms.append(replace(ms, service_time_s=times))
    new_links = []
    for link in app.links:
        din = snapshot.data_mbit.get((link.src, link.dst, "in"), link.data_in_mbit)
        dout = snapshot.data_mbit.get((link.src, link.dst, "out"), link.data_out_mbit)
        new_links.append(replace(link, data_in_mbit=din, data_out_mbit=dout))
    return ApplicationGraph(app.name, tuple(new_ms), tuple(new_links), app.pipelines)


def solve(problem: PartitionProblem, method: str = "auto") -> PartitionResult:
    if len(problem.tiers) > 2:
        return partition_multi_tier(problem, method=method)
    return partition(problem, method=method)


def conditions_changed(
    problem: PartitionProblem,
    current: PartitionResult,
    config: SchedulerConfig,
) -> bool:
    """True when the current placement should be reconsidered.

    problem must already carry the snapshot's bandwidths, times and data.
    Fires on (a) any pipeline predicted over budget under the current
    placement, or (b) a re-solve that saves more than the improvement
    threshold while staying under budget with hysteresis margin.
    """
    fired, _ = evaluate_conditions(problem, current, config)
    return fired


def evaluate_conditions(
    problem: PartitionProblem,
    current: PartitionResult,
    config: SchedulerConfig,
) -> tuple[bool, PartitionResult | None]:
    """conditions_changed plus the re-solve it already paid for."""
    for pipe in problem.app.pipelines:
        lat = pipeline_latency(problem.app, problem.tiers, current.placement, problem.net, pipe)
        if lat > problem.constraint_of(pipe.id):
            return True, None

    fresh = solve(problem)
    if not fresh.feasible:
        return False, fresh
    current_cost = total_cost(
        problem.app, problem.tiers, current.placement, problem.weights
    ).total
    if current_cost <= 0:
        return False, fresh
    saving = (current_cost - fresh.cost) / current_cost
    if saving <= config.improvement_threshold:
        return False, fresh
    for pipe in problem.app.pipelines:
        budget = problem.constraint_of(pipe.id) * (1.0 - config.hysteresis_margin)
        if fresh.latency_s[pipe.id] > budget:
            return False, fresh
    if fresh.placement.assignment == current.placement.assignment:
        return False, fresh
    return True, fresh


def apply_placement(
    app: ApplicationGraph,
    new: Placement,
    old: Placement,
    config: SchedulerConfig,
    orchestration: Orchestration,
    now_s: float = 0.0,
) -> MigrationPlan:
    """Migration plan containing only the vertices whose tier changed.

    The plan takes effect atomically at now + activation_delay; units in
    flight finish on the old placement. A tier without room for the net
    incoming vCPU demand rejects the whole plan.
    """
    moves = tuple(
        Move(ms.id, old.tier_of(ms.id), new.tier_of(ms.id))
        for ms in sorted(app.microservices, key=lambda m: m.id)
        if new.tier_of(ms.id) != old.tier_of(ms.id)
    )
    effective = now_s + config.activation_delay_s
    if not moves:
        return MigrationPlan(moves=(), effective_s=effective)
    delta: dict[str, float] = {}
    for mv in moves:
        ms = app.microservice(mv.ms_id)
        delta[mv.to_tier] = delta.get(mv.to_tier, 0.0) + ms.vcpus
        delta[mv.from_tier] = delta.get(mv.from_tier, 0.0) - ms.vcpus
    for tier_id in sorted(delta):
        if delta[tier_id] > 0 and orchestration.free_vcpus(tier_id) < delta[tier_id]:
            return MigrationPlan(
                moves=moves,
                effective_s=effective,
                rejected_reason=f"tier {tier_id} lacks {delta[tier_id]:g} free vCPUs",
            )
    return MigrationPlan(moves=moves, effective_s=effective)


@dataclass
class ManagedApp:
    """One application under the loop's control."""

    app: ApplicationGraph
    proxy_sync: ProxySyncConfig = ProxySyncConfig()
    constraints: dict[str, float] | None = None
    # populated once scheduled:
    scheduled: bool = False
    active_app: ApplicationGraph | None = None
    placement: Placement | None = None
    result: PartitionResult | None = None
    proxy_rules: tuple = ()
    _condition_cache: tuple | None = None


class Scheduler:
    """Drives initial mapping and dynamic re-mapping from snapshots."""

    def __init__(
        self,
        apps: list[ManagedApp],
        tiers: TierChain,
        base_net: NetworkState,
        weights: PricingWeights = PricingWeights(),
        config: SchedulerConfig = SchedulerConfig(),
        orchestration: Orchestration | None = None,
        dynamic: bool = True,
        method: str = "auto",
    ) -> None:
        self.apps = apps
        self.tiers = tiers
        self.base_net = base_net
        self.weights = weights
        self.config = config
        self.orchestration = orchestration or UnboundedOrchestration()
        self.dynamic = dynamic
        self.method = method

    def _problem(self, app: ApplicationGraph, managed: ManagedApp, snapshot: MetricsSnapshot) -> PartitionProblem:
        return PartitionProblem(
            app=snapshot_application(app, snapshot),
            tiers=self.tiers,
            net=snapshot_network(self.tiers, self.base_net, snapshot),
            weights=self.weights,
            constraints=managed.constraints,
        )

    def tick(self, now_s: float, snapshot: MetricsSnapshot) -> list[SchedulerEvent]:
        events: list[SchedulerEvent] = []
        for managed in self.apps:
            if not managed.scheduled:
                events.extend(self._schedule_initial(managed, now_s, snapshot))
            elif self.dynamic:
                events.extend(self._recheck(managed, now_s, snapshot))
        return events

    def _schedule_initial(
        self, managed: ManagedApp, now_s: float, snapshot: MetricsSnapshot
    ) -> list[SchedulerEvent]:
        name = managed.app.name
        problem = self._problem(managed.app, managed, snapshot)
        result = solve(problem, method=self.method)
        if not result.feasible:
            return [
                SchedulerEvent(
                    now_s, name, "notify_infeasible",
                    f"pipeline={result.violated_pipeline};stage={result.infeasible_stage}",
                )
            ]
        active_app, placement, rules = insert_proxies(
            managed.app, self.tiers, result.placement, managed.proxy_sync
        )
        if rules:
            problem = self._problem(active_app, managed, snapshot)
            result = solve(problem, method=self.method)
            if not result.feasible:
                return [
                    SchedulerEvent(
                        now_s, name, "notify_infeasible",
                        f"pipeline={result.violated_pipeline};after=proxy-insertion",
                    )
                ]
            placement = result.placement
        managed.scheduled = True
        managed.active_app = active_app
        managed.placement = placement
        managed.result = result
        managed.proxy_rules = rules
        managed._condition_cache = None
        self.orchestration.activate(name, placement, now_s)
        detail = f"placement={placement.tag()};cost={result.cost:.9g}"
        events = [SchedulerEvent(now_s, name, "scheduled", detail)]
        for rule in rules:
            events.append(
                SchedulerEvent(now_s, name, "proxy_inserted", f"proxy={rule.proxy};target={rule.target}")
            )
        return events

    def _signature(self, problem: PartitionProblem, managed: ManagedApp) -> tuple:
        net = tuple(
            (p.lo, p.hi, p.bw_up_mbps, p.bw_down_mbps) for p in problem.net.pairs
        )
        times = tuple(
            (ms.id,) + tuple(sorted(ms.service_time_s.items()))
            for ms in problem.app.microservices
        )
        data = tuple((l.src, l.dst, l.data_in_mbit, l.data_out_mbit) for l in problem.app.links)
        return (net, times, data, managed.placement.tag())

    def _recheck(
        self, managed: ManagedApp, now_s: float, snapshot: MetricsSnapshot
    ) -> list[SchedulerEvent]:
        name = managed.app.name
        problem = self._problem(managed.active_app, managed, snapshot)
        sig = self._signature(problem, managed)
        if managed._condition_cache == sig:
            return []
        fired, fresh = evaluate_conditions(problem, managed.result, self.config)
        if not fired:
            managed._condition_cache = sig
            return []
        if fresh is None:
            fresh = solve(problem, method=self.method)
        if not fresh.feasible:
            managed._condition_cache = sig
            return [
                SchedulerEvent(
                    now_s, name, "notify_infeasible",
                    f"pipeline={fresh.violated_pipeline};placement=unchanged",
                )
            ]
        plan = apply_placement(
            managed.active_app, fresh.placement, managed.placement,
            self.config, self.orchestration, now_s,
        )
        if not plan.accepted:
            managed._condition_cache = sig
            return [SchedulerEvent(now_s, name, "reject_capacity", plan.rejected_reason)]
        if not plan.moves:
            managed._condition_cache = sig
            return []
        managed.placement = fresh.placement
        managed.result = fresh
        managed._condition_cache = None
        self.orchestration.activate(name, fresh.placement, plan.effective_s)
        moves = ",".join(str(m) for m in plan.moves)
        return [
            SchedulerEvent(
                now_s, name, "remap",
                f"moves={moves};effective_s={plan.effective_s:.6f};cost={fresh.cost:.9g}",
            )
        ]


def run_scheduling_loop(
    scheduler: Scheduler,
    snapshot_fn: Callable[[float], MetricsSnapshot],
    duration_s: float,
) -> list[SchedulerEvent]:
    """Tick the scheduler on simulated time; returns the event log."""
    events: list[SchedulerEvent] = []
    t = 0.0
    k = 0
    while t <= duration_s:
        events.extend(scheduler.tick(t, snapshot_fn(t)))
        k += 1
        t = k * scheduler.config.interval_s
    return events


# --- multi-zone registry and the central deploy flow -----------------------


@dataclass
class VmSlot:
    id: str
    vcpus: float
    used_vcpus: float = 0.0
    healthy: bool = True

    @property
    def free_vcpus(self) -> float:
        return self.vcpus - self.used_vcpus


@dataclass
class Zone:
    id: str
    kind: str  # "wavelength" | "availability"
    region: str
    reachable: bool = True
    vms: list[VmSlot] = field(default_factory=list)
    last_heartbeat_s: float = 0.0


class ZoneRegistry:
    def __init__(self, zones: list[Zone] | None = None) -> None:
        self.zones: list[Zone] = list(zones or [])

    def find(self, region: str, kind: str) -> Zone | None:
        for z in self.zones:
            if z.region == region and z.kind == kind:
                return z
        return None

    def add(self, zone: Zone) -> Zone:
        self.zones.append(zone)
        return zone


@dataclass(frozen=True)
class DeployRequest:
    region: str
    app: str
    vcpus_demand: float = 4.0


@dataclass
class DeployOutcome:
    ok: bool
    error: str | None = None
    zones_created: list[str] = field(default_factory=list)
    zones_reused: list[str] = field(default_factory=list)
    vms_created: list[str] = field(default_factory=list)
    vms_reused: list[str] = field(default_factory=list)
    placement: Placement | None = None
    events: list[SchedulerEvent] = field(default_factory=list)


DEFAULT_VM_VCPUS = 4.0  # t3.xlarge


def handle_deploy_request(
    request: DeployRequest,
    registry: ZoneRegistry,
    solve_fn: Callable[[], PartitionResult] | None = None,
    now_s: float = 0.0,
) -> DeployOutcome:
    """Serve one deployment request against the registry.

    Zones for the region are reused when present and reachable, created
    otherwise; existing VMs are reused while they have capacity, new VM
    records fill the gap; unhealthy VMs abort the request. When a solver
    is supplied the app's placement is computed as part of deployment.
    """
    out = DeployOutcome(ok=False)

    def note(event_type: str, detail: str) -> None:
        out.events.append(SchedulerEvent(now_s, request.app, event_type, detail))

    zones: list[Zone] = []
    for kind in ("wavelength", "availability"):
        zone = registry.find(request.region, kind)
        if zone is None:
            zone = registry.add(Zone(id=f"{request.region}-{kind}", kind=kind, region=request.region))
            out.zones_created.append(zone.id)
            note("zone_created", f"zone={zone.id}")
        else:
            if not zone.reachable:
                out.error = f"zone unreachable: {zone.id}"
                note("deploy_error", out.error)
                return out
            out.zones_reused.append(zone.id)
            note("zone_reused", f"zone={zone.id}")
        zones.append(zone)

    allocations: list[tuple[VmSlot, float]] = []
    for zone in zones:
        selected: list[VmSlot] = []
        remaining = request.vcpus_demand
        for vm in zone.vms:
            if remaining <= 0:
                break
            if vm.free_vcpus > 0:
                selected.append(vm)
                remaining -= vm.free_vcpus
        if any(not vm.healthy for vm in selected):
            bad = ",".join(vm.id for vm in selected if not vm.healthy)
            out.error = f"unhealthy VMs: {bad}"
            note("deploy_error", out.error)
            return out
        for vm in selected:
            out.vms_reused.append(vm.id)
            note("vm_reused", f"vm={vm.id}")
        while remaining > 0:
            vm = VmSlot(id=f"{zone.id}-vm{len(zone.vms) + 1}", vcpus=DEFAULT_VM_VCPUS)
            zone.vms.append(vm)
            selected.append(vm)
            out.vms_created.append(vm.id)
            note("vm_created", f"vm={vm.id}")
            remaining -= vm.vcpus
        # the app is pre-loaded in both zones, so each reserves the full demand
        demand = request.vcpus_demand
        for vm in selected:
            take = min(vm.free_vcpus, demand)
            allocations.append((vm, take))
            demand -= take
            if demand <= 0:
                break

    if solve_fn is not None:
        result = solve_fn()
        if not result.feasible:
            out.error = f"no feasible placement (pipeline={result.violated_pipeline})"
            note("deploy_error", out.error)
            return out
        out.placement = result.placement
        note("deployed", f"placement={result.placement.tag()}")
    else:
        note("deployed", "placement=deferred")
    for vm, take in allocations:
        vm.used_vcpus += take
    out.ok = True
    return out
