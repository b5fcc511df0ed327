"""Minimum-cost placement under per-pipeline latency constraints.

Two-tier problems are solved exactly with branch and bound over the
vertex assignment (complete up to EXACT_VERTEX_LIMIT free vertices);
larger instances fall back to a seeded local search. Chains of three or
more tiers are handled bottom-up: split everything between the lowest
tier and "upper", then repeatedly re-split only the vertices still
sitting at the upper tier against the next one, re-checking the full
composed latency at every stage.

Tie-breaking is total so identical problems always return identical
placements: (cost, max pipeline latency, cut size, lexicographic
assignment).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    ApplicationGraph,
    CommLinkSpec,
    CriticalPipeline,
    MicroserviceSpec,
    ModelError,
    Placement,
    TierChain,
)
from .perf import NetworkState, PricingWeights, comm_weight, pipeline_latency, total_cost

# Above this many free vertices the exact search is declined (unless
# forced) and local search takes over.
EXACT_VERTEX_LIMIT = 20
_LOCAL_SEARCH_RESTARTS = 8
_LOCAL_SEARCH_SEED = 0x5EED
# Pruning slack: never discard a branch over float association noise.
_PRUNE_EPS = 1e-12


@dataclass(frozen=True)
class PartitionProblem:
    app: ApplicationGraph
    tiers: TierChain
    net: NetworkState
    weights: PricingWeights = PricingWeights()
    constraints: dict[str, float] | None = None  # pipeline id -> seconds; None = from app

    def constraint_of(self, pipeline_id: str) -> float:
        if self.constraints is not None:
            if pipeline_id not in self.constraints:
                raise ModelError(f"no latency constraint for pipeline {pipeline_id!r}")
            return self.constraints[pipeline_id]
        return self.app.pipeline(pipeline_id).latency_constraint_s


@dataclass(frozen=True)
class PartitionResult:
    placement: Placement
    cost: float
    latency_s: dict[str, float]
    feasible: bool
    solver: str  # "exact" | "heuristic"
    violated_pipeline: str | None = None
    infeasible_stage: int | None = None
    stage_costs: tuple[float, ...] = ()


@dataclass(frozen=True)
class ProxyRule:
    """Background sync contract between an edge proxy and its store master."""

    target: str
    proxy: str
    sync_interval_s: float
    batch_size: int
    record_mbit: float
    overhead_mbit: float

    def __post_init__(self) -> None:
        if self.sync_interval_s <= 0:
            raise ModelError("sync interval must be > 0")
        if self.batch_size < 1:
            raise ModelError("batch size must be >= 1")


@dataclass(frozen=True)
class ProxySyncConfig:
    sync_interval_s: float = 60.0
    batch_size: int = 1000
    record_mbit: float = 0.001
    overhead_mbit: float = 0.01
    batching: bool = True


def _placement_key(problem: PartitionProblem, placement: Placement) -> tuple:
    """Total order used to break cost ties deterministically."""
    lat = [
        pipeline_latency(problem.app, problem.tiers, placement, problem.net, p)
        for p in problem.app.pipelines
    ]
    max_lat = max(lat) if lat else 0.0
    cut = sum(
        1
        for l in problem.app.links
        if placement.tier_of(l.src) != placement.tier_of(l.dst)
    )
    ranks = tuple(
        problem.tiers.rank_of(placement.assignment[m])
        for m in sorted(placement.assignment)
    )
    return (max_lat, cut, ranks)


def _candidate(problem: PartitionProblem, assign: dict[str, str]) -> dict:
    """Fully evaluated placement plus the orderings the searches need."""
    placement = Placement(dict(assign))
    lat: dict[str, float] = {}
    feasible = True
    worst: str | None = None
    worst_gap = 0.0
    for pipe in problem.app.pipelines:
        l = pipeline_latency(problem.app, problem.tiers, placement, problem.net, pipe)
        lat[pipe.id] = l
        gap = l - problem.constraint_of(pipe.id)
        if gap > 0:
            feasible = False
            if worst is None or gap > worst_gap:
                worst, worst_gap = pipe.id, gap
    cost = total_cost(problem.app, problem.tiers, placement, problem.weights).total
    key = (cost,) + _placement_key(problem, placement)
    return {
        "placement": placement,
        "cost": cost,
        "lat": lat,
        "feasible": feasible,
        "worst": worst,
        "key": key,
        # infeasible candidates rank strictly after every feasible one,
        # and among themselves by how badly they miss the budget
        "rank": (0 if feasible else 1, worst_gap if not feasible else 0.0) + key,
    }


def _decision_space(problem: PartitionProblem) -> tuple[list[str], list[tuple[str, ...]]]:
    ids = sorted(ms.id for ms in problem.app.microservices)
    options = []
    for ms_id in ids:
        ms = problem.app.microservice(ms_id)
        allowed = ms.allowed_tiers(problem.tiers)
        if not allowed:
            raise ModelError(f"microservice {ms_id!r} cannot run on any tier in the chain")
        options.append(allowed)
    return ids, options


def _exact_search(problem: PartitionProblem, ids: list[str], options: list[tuple[str, ...]]):
    """Branch and bound; returns the best feasible and least-violating leaves.

    Vertices are fixed in sorted order. A branch dies when the optimistic
    cost (fixed prefix at chosen tiers, remainder at each vertex's
    cheapest tier) exceeds the incumbent, or when a pipeline's latency
    lower bound (fixed vertices at their tier, unfixed at their fastest,
    plus fully-fixed cut links) already exceeds its constraint.
    """
    app, tiers, net, weights = problem.app, problem.tiers, problem.net, problem.weights
    edge_id = tiers.edge.id
    price = {t.id: t.price_rate for t in tiers}
    factor = {t.id: (weights.c_edge if t.id == edge_id else weights.c_cloud) for t in tiers}

    min_cost_tail = [0.0] * (len(ids) + 1)
    for i in range(len(ids) - 1, -1, -1):
        ms = app.microservice(ids[i])
        best = min(factor[t] * (ms.time_at(t) * price[t]) for t in options[i])
        min_cost_tail[i] = min_cost_tail[i + 1] + best

    min_time = {}
    for ms_id, opts in zip(ids, options):
        ms = app.microservice(ms_id)
        min_time[ms_id] = min(ms.time_at(t) for t in opts)

    pipes = list(app.pipelines)
    pipe_links = {p.id: app.pipeline_links(p) for p in pipes}
    specs = {ms_id: app.microservice(ms_id) for ms_id in ids}

    best_feasible: dict | None = None
    best_any: dict | None = None
    assign: dict[str, str] = {}

    def latency_lb(pipe: CriticalPipeline) -> float:
        lb = 0.0
        for ms_id in pipe.path:
            if ms_id in assign:
                lb += specs[ms_id].time_at(assign[ms_id])
            else:
                lb += min_time[ms_id]
        for link in pipe_links[pipe.id]:
            if link.src in assign and link.dst in assign:
                lb += comm_weight(link, net, tiers, assign[link.src], assign[link.dst])
        return lb

    def consider_leaf() -> None:
        nonlocal best_feasible, best_any
        cand = _candidate(problem, assign)
        if cand["feasible"] and (best_feasible is None or cand["key"] < best_feasible["key"]):
            best_feasible = cand
        if best_any is None or cand["rank"] < best_any["rank"]:
            best_any = cand

    def walk(i: int, prefix_cost: float) -> None:
        if i == len(ids):
            consider_leaf()
            return
        ms = specs[ids[i]]
        for tier_id in options[i]:
            step = factor[tier_id] * (ms.time_at(tier_id) * price[tier_id])
            optimistic = prefix_cost + step + min_cost_tail[i + 1]
            if best_feasible is not None and optimistic > best_feasible["cost"] + _PRUNE_EPS:
                continue
            assign[ids[i]] = tier_id
            if all(latency_lb(p) <= problem.constraint_of(p.id) + _PRUNE_EPS for p in pipes):
                walk(i + 1, prefix_cost + step)
            del assign[ids[i]]

    walk(0, 0.0)
    if best_feasible is None:
        # Re-enumerate without pruning so the least-violating placement
        # (and the tightest pipeline) can be reported honestly.
        best_any = None

        def walk_all(i: int) -> None:
            if i == len(ids):
                consider_leaf()
                return
            for tier_id in options[i]:
                assign[ids[i]] = tier_id
                walk_all(i + 1)
                del assign[ids[i]]

        walk_all(0)
    return best_feasible, best_any


def _local_search(problem: PartitionProblem, ids: list[str], options: list[tuple[str, ...]]):
    """Seeded hill climbing over single-vertex tier flips."""
    rng = random.Random(_LOCAL_SEARCH_SEED)
    opts_of = dict(zip(ids, options))
    app, tiers, weights = problem.app, problem.tiers, problem.weights
    edge_id = tiers.edge.id

    starts: list[dict[str, str]] = []
    starts.append({m: opts[0] for m, opts in opts_of.items()})  # as low as allowed
    cheapest = {}
    for m, opts in opts_of.items():
        ms = app.microservice(m)
        cheapest[m] = min(
            opts,
            key=lambda t: (
                (weights.c_edge if t == edge_id else weights.c_cloud)
                * (ms.time_at(t) * tiers.by_id(t).price_rate)
            ),
        )
    starts.append(cheapest)
    for _ in range(_LOCAL_SEARCH_RESTARTS):
        starts.append({m: rng.choice(opts) for m, opts in opts_of.items()})

    best: dict | None = None
    for start in starts:
        assign = dict(start)
        current = _candidate(problem, assign)
        improved = True
        while improved:
            improved = False
            for m in ids:
                for tier_id in opts_of[m]:
                    if tier_id == assign[m]:
                        continue
                    trial = dict(assign)
                    trial[m] = tier_id
                    cand = _candidate(problem, trial)
                    if cand["rank"] < current["rank"]:
                        assign, current = trial, cand
                        improved = True
        if best is None or current["rank"] < best["rank"]:
            best = current
    return best


def partition(problem: PartitionProblem, method: str = "auto") -> PartitionResult:
    """Cheapest feasible placement.

    method: "auto" picks exact up to EXACT_VERTEX_LIMIT free vertices,
    "exact" forces branch and bound, "heuristic" forces local search.
    """
    for pipe in problem.app.pipelines:
        problem.constraint_of(pipe.id)
    ids, options = _decision_space(problem)
    free = sum(1 for o in options if len(o) > 1)
    if method == "auto":
        method = "exact" if free <= EXACT_VERTEX_LIMIT else "heuristic"

    if method == "exact":
        best_feasible, best_any = _exact_search(problem, ids, options)
        b = best_feasible if best_feasible is not None else best_any
        return PartitionResult(
            placement=b["placement"], cost=b["cost"], latency_s=b["lat"],
            feasible=b["feasible"], solver="exact",
            violated_pipeline=None if b["feasible"] else b["worst"],
        )
    if method == "heuristic":
        b = _local_search(problem, ids, options)
        return PartitionResult(
            placement=b["placement"], cost=b["cost"], latency_s=b["lat"],
            feasible=b["feasible"], solver="heuristic",
            violated_pipeline=None if b["feasible"] else b["worst"],
        )
    raise ValueError(f"unknown method {method!r}")


def partition_multi_tier(problem: PartitionProblem, method: str = "auto") -> PartitionResult:
    """Bottom-up pairwise partitioning across a chain of 3+ tiers.

    Stage k decides, for every vertex still unresolved, whether it stays
    at tier k or remains pending at the lowest upper tier it may occupy.
    Full composed latency is checked against the original constraints at
    every stage, and each stage's search space contains the previous
    stage's outcome, so stage costs never increase.
    """
    tiers = problem.tiers
    if len(tiers) == 2:
        return partition(problem, method=method)

    ids, options = _decision_space(problem)
    opts_of = dict(zip(ids, options))
    solver_name = "heuristic" if method == "heuristic" else "exact"
    resolved: dict[str, str] = {}
    pending = list(ids)
    stage_costs: list[float] = []

    for k in range(len(tiers) - 1):
        tier_k = tiers.tiers[k].id
        upper_ids = tuple(t.id for t in tiers.tiers[k + 1:])
        stage_ids: list[str] = []
        stage_options: list[tuple[str, ...]] = []
        carried: dict[str, str] = {}
        for m in pending:
            opts = opts_of[m]
            here = tier_k in opts
            uppers = tuple(t for t in opts if t in upper_ids)
            if here and uppers:
                stage_ids.append(m)
                stage_options.append((tier_k, uppers[0]))
            elif here:
                carried[m] = tier_k
            elif uppers:
                carried[m] = uppers[0]
            else:
                raise ModelError(f"microservice {m!r} cannot run at tier {tier_k!r} or above")

        fixed = dict(resolved)
        fixed.update(carried)
        best = _stage_search(problem, stage_ids, stage_options, fixed, method)
        if not best["feasible"]:
            return PartitionResult(
                placement=best["placement"], cost=best["cost"], latency_s=best["lat"],
                feasible=False, solver=solver_name,
                violated_pipeline=best["worst"], infeasible_stage=k,
                stage_costs=tuple(stage_costs),
            )
        stage_costs.append(best["cost"])
        last_stage = k == len(tiers) - 2
        still_pending: list[str] = []
        for m in pending:
            chosen = best["placement"].tier_of(m)
            if chosen == tier_k or last_stage:
                resolved[m] = chosen
            else:
                still_pending.append(m)
        pending = still_pending
        if not pending:
            break

    placement = Placement({m: resolved[m] for m in ids})
    final = _candidate(problem, placement.assignment)
    return PartitionResult(
        placement=placement, cost=final["cost"], latency_s=final["lat"],
        feasible=final["feasible"], solver=solver_name,
        violated_pipeline=final["worst"], stage_costs=tuple(stage_costs),
    )


def _stage_search(problem, stage_ids, stage_options, fixed, method):
    """Exact-or-heuristic search over one stage's binary choices."""
    if not stage_ids:
        return _candidate(problem, dict(fixed))
    ids_all = sorted(set(stage_ids) | set(fixed))
    stage_opt = dict(zip(stage_ids, stage_options))
    options_all = [stage_opt.get(m, (fixed.get(m),)) for m in ids_all]
    use_exact = method != "heuristic" and (
        method == "exact" or len(stage_ids) <= EXACT_VERTEX_LIMIT
    )
    if use_exact:
        best_feasible, best_any = _exact_search(problem, ids_all, options_all)
        return best_feasible if best_feasible is not None else best_any
    return _local_search(problem, ids_all, options_all)


def insert_proxies(
    app: ApplicationGraph,
    tiers: TierChain,
    placement: Placement,
    sync: ProxySyncConfig = ProxySyncConfig(),
) -> tuple[ApplicationGraph, Placement, tuple[ProxyRule, ...]]:
    """Terminate pipelines at the edge with proxies for remote store masters.

    When a pipeline ends at a store-backed microservice placed above the
    pipeline's lowest occupied tier, a proxy vertex named "<master>-E" is
    pinned at that low tier, the pipeline is rewritten to end there, and
    the master drops off the critical path. Delivery then happens locally
    and the store syncs in the background under the returned rule.
    Already-present proxies are left alone, so the rewrite is idempotent.
    """
    new_ms = list(app.microservices)
    new_links = list(app.links)
    new_pipes = list(app.pipelines)
    assignment = dict(placement.assignment)
    rules: list[ProxyRule] = []
    created: set[str] = set()  # proxies added in this pass; pipelines may share a master

    for idx, pipe in enumerate(app.pipelines):
        last = pipe.path[-1]
        ms = app.microservice(last)
        if ms.store is None or len(pipe.path) < 2:
            continue
        proxy_id = f"{last}-E"
        if app.has_microservice(proxy_id):
            continue
        ranks = [tiers.rank_of(placement.tier_of(m)) for m in pipe.path]
        edge_rank = min(ranks)
        if tiers.rank_of(placement.tier_of(last)) <= edge_rank:
            continue
        edge_tier = tiers.tiers[edge_rank].id
        if proxy_id not in created:
            created.add(proxy_id)
            new_ms.append(
                MicroserviceSpec(
                    id=proxy_id,
                    service_time_s={edge_tier: ms.store.proxy_time_s},
                    bound_tier=edge_tier,
                    vcpus=ms.vcpus,
                )
            )
            assignment[proxy_id] = edge_tier
            rules.append(
                ProxyRule(
                    target=last,
                    proxy=proxy_id,
                    sync_interval_s=sync.sync_interval_s,
                    batch_size=sync.batch_size,
                    record_mbit=sync.record_mbit,
                    overhead_mbit=sync.overhead_mbit,
                )
            )
        prev = pipe.path[-2]
        old_link = app.link(prev, last)
        if old_link in new_links:
            new_links.remove(old_link)
        if not any(l.src == prev and l.dst == proxy_id for l in new_links):
            new_links.append(
                CommLinkSpec(prev, proxy_id, old_link.data_in_mbit, old_link.data_out_mbit)
            )
        new_pipes[idx] = CriticalPipeline(
            id=pipe.id,
            path=pipe.path[:-1] + (proxy_id,),
            latency_constraint_s=pipe.latency_constraint_s,
        )

    if not rules:
        return app, placement, ()
    augmented = ApplicationGraph(
        name=app.name,
        microservices=tuple(new_ms),
        links=tuple(new_links),
        pipelines=tuple(new_pipes),
    )
    return augmented, Placement(assignment), tuple(rules)
