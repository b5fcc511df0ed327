"""Handlers behind the service endpoints; the CLI calls them in-process."""

from __future__ import annotations

import io
import csv

from .costs import monthly_cost
from .partition import PartitionProblem, PartitionResult, insert_proxies
from .perf import BANDWIDTH_FLOOR_MBPS, NetworkState, TierPairLink
from .scenario import Scenario, load_scenario, parse_scenario
from .scheduling import DeployRequest, ZoneRegistry, handle_deploy_request, solve
from .schemas import (
    CostRequest,
    CostResponse,
    DeployRequestModel,
    DeployResponse,
    EventModel,
    PartitionRequest,
    PartitionResponse,
    PipelineLatencyModel,
    PipelineSummaryModel,
    PlanCostModel,
    RegistryResponse,
    RegistryVmModel,
    RegistryZoneModel,
    ReplayRequest,
    ReplayResponse,
    ScenarioRef,
    SimulateRequest,
    SimulateResponse,
)
from .sim import Simulation, events_csv, latency_csv, links_csv, metrics_csv


def resolve_scenario(ref: ScenarioRef) -> Scenario:
    if ref.scenario_path is not None:
        return load_scenario(ref.scenario_path)
    return parse_scenario(ref.scenario)


def _solve_with_proxies(
    scenario: Scenario,
    net: NetworkState,
    constraint_s: float | None,
    method: str,
    multi_tier: bool = False,
) -> tuple[PartitionResult, list[str]]:
    from .partition import partition_multi_tier

    solve_fn = partition_multi_tier if multi_tier else solve
    constraints = None
    if constraint_s is not None:
        constraints = {p.id: constraint_s for p in scenario.app.pipelines}
    problem = PartitionProblem(
        app=scenario.app, tiers=scenario.tiers, net=net,
        weights=scenario.weights, constraints=constraints,
    )
    result = solve_fn(problem, method=method)
    if not result.feasible:
        return result, []
    augmented, _, rules = insert_proxies(
        scenario.app, scenario.tiers, result.placement, scenario.proxy_sync
    )
    if rules:
        problem = PartitionProblem(
            app=augmented, tiers=scenario.tiers, net=net,
            weights=scenario.weights,
            constraints={p.id: constraint_s for p in augmented.pipelines} if constraint_s is not None else None,
        )
        result = solve_fn(problem, method=method)
    return result, [r.proxy for r in rules]


def _partition_response(
    scenario: Scenario, result: PartitionResult, proxies: list[str],
    constraint_s: float | None,
) -> PartitionResponse:
    latencies = []
    for pipe, lat in sorted(result.latency_s.items()):
        budget = constraint_s if constraint_s is not None else scenario.app.pipeline(pipe).latency_constraint_s
        latencies.append(
            PipelineLatencyModel(
                pipeline=pipe, latency_s=lat, constraint_s=budget,
                meets_constraint=lat <= budget,
            )
        )
    return PartitionResponse(
        scenario=scenario.name,
        feasible=result.feasible,
        solver=result.solver,
        cost=result.cost,
        placement=dict(sorted(result.placement.assignment.items())),
        latencies=latencies,
        violated_pipeline=result.violated_pipeline,
        proxies=proxies,
    )


def run_partition(req: PartitionRequest) -> PartitionResponse:
    scenario = resolve_scenario(req)
    scenario.require("tiers", "net", "app")
    method = "exact" if req.exact_only else "auto"
    result, proxies = _solve_with_proxies(
        scenario, scenario.net, req.constraint_s, method, multi_tier=req.multi_tier
    )
    return _partition_response(scenario, result, proxies, req.constraint_s)


def run_replay(req: ReplayRequest) -> ReplayResponse:
    scenario = resolve_scenario(req)
    scenario.require("tiers", "net", "app")
    pairs = []
    bandwidths: dict[str, float] = {}
    traced = {(t.lo, t.hi, t.direction): t.series for t in scenario.bandwidth_traces}
    for p in scenario.net.pairs:
        up = traced.get((p.lo, p.hi, "up"))
        down = traced.get((p.lo, p.hi, "down"))
        up_v = max(up.value_at(req.at_s), BANDWIDTH_FLOOR_MBPS) if up else p.bw_up_mbps
        down_v = max(down.value_at(req.at_s), BANDWIDTH_FLOOR_MBPS) if down else p.bw_down_mbps
        pairs.append(TierPairLink(p.lo, p.hi, up_v, down_v, p.rtt_s))
        bandwidths[f"{p.lo}->{p.hi}:up"] = up_v
        bandwidths[f"{p.lo}->{p.hi}:down"] = down_v
    net = NetworkState(tuple(pairs))
    method = "exact" if req.exact_only else "auto"
    result, proxies = _solve_with_proxies(
        scenario, net, req.constraint_s, method, multi_tier=req.multi_tier
    )
    base = _partition_response(scenario, result, proxies, req.constraint_s)
    return ReplayResponse(**base.model_dump(), at_s=req.at_s, bandwidth_mbps=bandwidths)


def run_simulate(req: SimulateRequest) -> SimulateResponse:
    scenario = resolve_scenario(req)
    scenario.require("tiers", "net", "app")
    sim = Simulation(
        scenario, duration_s=req.duration_s, seed=req.seed,
        dynamic=req.dynamic, collect_metrics=req.metrics,
    )
    results = sim.run()
    stats = results.pipeline_stats(scenario.app)
    completed = sum(1 for u in results.units if u.completed_s is not None)
    return SimulateResponse(
        scenario=scenario.name,
        duration_s=req.duration_s,
        seed=req.seed,
        dynamic=req.dynamic,
        units_emitted=results.units_emitted,
        units_completed=completed,
        units_in_flight=results.units_in_flight(),
        remap_count=results.remap_count,
        sync_wan_mbit=results.sync_wan_mbit(),
        pipelines=[
            PipelineSummaryModel(
                pipeline=s.pipeline_id, units_completed=s.units_completed,
                p50_ms=s.p50_ms, p95_ms=s.p95_ms, max_ms=s.max_ms,
                violation_s=s.violation_s, constraint_s=s.constraint_s,
            )
            for s in stats
        ],
        latency_csv=latency_csv(results) if req.include_csv else None,
        links_csv=links_csv(results) if req.include_csv else None,
        events_csv=events_csv(results) if req.include_csv else None,
        metrics_csv=metrics_csv(results) if req.include_csv and req.metrics else None,
    )


def run_cost(req: CostRequest) -> CostResponse:
    scenario = resolve_scenario(req)
    scenario.require("deployment")
    section = scenario.deployment
    rows = []
    for plan in section.plans:
        mc = monthly_cost(plan, section.catalog, section.storage_month, section.sizing)
        rows.append(
            PlanCostModel(
                plan=mc.plan, hourly=mc.hourly, compute=mc.compute,
                storage=mc.storage, total=mc.total,
            )
        )
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["plan", "price_per_hour", "compute_per_month", "storage_per_month", "total_per_month"])
    for r in rows:
        w.writerow([r.plan, f"{r.hourly:.4f}", f"{r.compute:.2f}", f"{r.storage:.2f}", f"{r.total:.2f}"])
    return CostResponse(scenario=scenario.name, plans=rows, csv=buf.getvalue())


def run_deploy(req: DeployRequestModel, registry: ZoneRegistry) -> DeployResponse:
    scenario = resolve_scenario(req)
    scenario.require("tiers", "net", "app")
    demand = sum(ms.vcpus for ms in scenario.app.microservices)

    def solve_fn():
        result, _ = _solve_with_proxies(scenario, scenario.net, None, "auto")
        return result

    outcome = handle_deploy_request(
        DeployRequest(region=req.region, app=scenario.app.name, vcpus_demand=demand),
        registry,
        solve_fn=solve_fn,
    )
    return DeployResponse(
        ok=outcome.ok,
        error=outcome.error,
        zones_created=outcome.zones_created,
        zones_reused=outcome.zones_reused,
        vms_created=outcome.vms_created,
        vms_reused=outcome.vms_reused,
        placement=dict(sorted(outcome.placement.assignment.items())) if outcome.placement else None,
        events=[
            EventModel(time_s=e.time_s, app=e.app, event_type=e.event_type, detail=e.detail)
            for e in outcome.events
        ],
    )


def registry_snapshot(registry: ZoneRegistry) -> RegistryResponse:
    return RegistryResponse(
        zones=[
            RegistryZoneModel(
                id=z.id, kind=z.kind, region=z.region, reachable=z.reachable,
                vms=[
                    RegistryVmModel(
                        id=vm.id, vcpus=vm.vcpus, used_vcpus=vm.used_vcpus, healthy=vm.healthy,
                    )
                    for vm in z.vms
                ],
            )
            for z in registry.zones
        ]
    )
