"""Independent reference implementations used to check the real ones.

Everything here deliberately re-derives results the naive way: latency by
walking a pipeline literally (service, link, service, ...), cost by a
flat loop in sorted vertex order, optimal placements by enumerating the
whole assignment space. These stay independent of the library's search
code; only the dataclasses are shared.
"""

from __future__ import annotations

import itertools
import random

from tiercut.model import (
    ApplicationGraph,
    CommLinkSpec,
    CriticalPipeline,
    MicroserviceSpec,
    Placement,
    Tier,
    TierChain,
)
from tiercut.perf import BANDWIDTH_FLOOR_MBPS, NetworkState, PricingWeights, TierPairLink


def naive_hop_weight(link: CommLinkSpec, net: NetworkState, tiers: TierChain,
                     tier_a: str, tier_b: str) -> float:
    ra, rb = tiers.rank_of(tier_a), tiers.rank_of(tier_b)
    lo, hi = min(ra, rb), max(ra, rb)
    w = 0.0
    r = lo
    while r < hi:
        pair = net.pair(tiers.tiers[r].id, tiers.tiers[r + 1].id)
        w += link.data_in_mbit / max(pair.bw_up_mbps, BANDWIDTH_FLOOR_MBPS)
        w += link.data_out_mbit / max(pair.bw_down_mbps, BANDWIDTH_FLOOR_MBPS)
        r += 1
    return w


def naive_pipeline_latency(app: ApplicationGraph, tiers: TierChain, placement: Placement,
                           net: NetworkState, pipeline: CriticalPipeline) -> float:
    """Walks the path literally: stage, crossing, stage, crossing, ..."""
    lat = 0.0
    path = pipeline.path
    for i, ms_id in enumerate(path):
        ms = app.microservice(ms_id)
        lat += ms.service_time_s[placement.tier_of(ms_id)]
        if i + 1 < len(path):
            nxt = path[i + 1]
            ta, tb = placement.tier_of(ms_id), placement.tier_of(nxt)
            if ta != tb:
                lat += naive_hop_weight(app.link(ms_id, nxt), net, tiers, ta, tb)
    return lat


def naive_total_cost(app: ApplicationGraph, tiers: TierChain, placement: Placement,
                     weights: PricingWeights) -> float:
    edge_id = tiers.edge.id
    total = 0.0
    for ms in sorted(app.microservices, key=lambda m: m.id):
        tier = tiers.by_id(placement.tier_of(ms.id))
        factor = weights.c_edge if tier.id == edge_id else weights.c_cloud
        total += factor * (ms.service_time_s[tier.id] * tier.price_rate)
    return total


def enumerate_best(app: ApplicationGraph, tiers: TierChain, net: NetworkState,
                   weights: PricingWeights, constraints: dict[str, float]):
    """Exhaustive minimum over every legal assignment.

    Returns (feasible, best) where best has placement/cost/latency keyed
    like the solver's result. Ties break on (cost, max latency, cut size,
    lexicographic ranks), mirroring the solver's published rule.
    """
    ids = sorted(ms.id for ms in app.microservices)
    allowed = [app.microservice(m).allowed_tiers(tiers) for m in ids]
    best_key = None
    best = None
    found_feasible = False
    for combo in itertools.product(*allowed):
        placement = Placement(dict(zip(ids, combo)))
        lat = {
            p.id: naive_pipeline_latency(app, tiers, placement, net, p)
            for p in app.pipelines
        }
        feasible = all(lat[p.id] <= constraints[p.id] for p in app.pipelines)
        if found_feasible and not feasible:
            continue
        cost = naive_total_cost(app, tiers, placement, weights)
        max_lat = max(lat.values()) if lat else 0.0
        cut = sum(
            1 for l in app.links if placement.tier_of(l.src) != placement.tier_of(l.dst)
        )
        ranks = tuple(tiers.rank_of(c) for c in combo)
        key = (cost, max_lat, cut, ranks)
        if feasible and not found_feasible:
            # first feasible assignment resets the incumbent
            found_feasible = True
            best_key, best = key, {"placement": placement, "cost": cost, "lat": lat}
        elif best_key is None or key < best_key:
            best_key, best = key, {"placement": placement, "cost": cost, "lat": lat}
    return found_feasible, best


def random_two_tier_problem(rng: random.Random, n_max: int = 12):
    """A random chain-of-pipelines problem plus its constraint map."""
    n = rng.randint(2, n_max)
    ids = [f"m{i:02d}" for i in range(n)]
    edge_price = rng.uniform(1.0, 4.0)
    tiers = TierChain(
        (
            Tier("edge", 0, edge_price),
            Tier("cloud", 1, edge_price * rng.uniform(0.2, 1.0)),
        )
    )
    microservices = []
    for i, ms_id in enumerate(ids):
        t_edge = rng.uniform(0.005, 0.05)
        t_cloud = t_edge * rng.uniform(0.3, 1.5)
        bound = "edge" if i == 0 and rng.random() < 0.7 else None
        times = {"edge": t_edge} if bound else {"edge": t_edge, "cloud": t_cloud}
        microservices.append(
            MicroserviceSpec(id=ms_id, service_time_s=times, bound_tier=bound)
        )
    perm = ids[:]
    rng.shuffle(perm)
    n_pipes = 1 if n < 4 or rng.random() < 0.5 else 2
    pipelines = []
    links: dict[tuple[str, str], CommLinkSpec] = {}
    cursor = 0
    for p in range(n_pipes):
        length = rng.randint(2, max(2, n - cursor)) if p == 0 else rng.randint(2, n)
        path = perm[cursor:cursor + length] if p == 0 else rng.sample(ids, min(length, n))
        if len(path) < 2:
            path = perm[:2]
        cursor += len(path)
        for a, b in zip(path, path[1:]):
            if (a, b) not in links and a != b:
                links[(a, b)] = CommLinkSpec(
                    a, b,
                    data_in_mbit=rng.uniform(0.0, 5.0),
                    data_out_mbit=rng.uniform(0.0, 0.5),
                )
        pipelines.append(CriticalPipeline(f"p{p}", tuple(path), latency_constraint_s=1.0))
    app = ApplicationGraph("random", tuple(microservices), tuple(links.values()), tuple(pipelines))
    net = NetworkState(
        (TierPairLink("edge", "cloud", rng.uniform(5.0, 60.0), rng.uniform(5.0, 60.0)),)
    )
    weights = PricingWeights()
    ref = Placement({
        m.id: rng.choice(m.allowed_tiers(tiers)) for m in app.microservices
    })
    constraints = {
        p.id: naive_pipeline_latency(app, tiers, ref, net, p) * rng.uniform(0.85, 1.6)
        for p in app.pipelines
    }
    return app, tiers, net, weights, constraints


def random_three_tier_problem(rng: random.Random, n_max: int = 9):
    """Three-tier chain with tier-independent service times.

    Tier-independent times keep the bottom-up iteration's feasibility
    verdict provably aligned with full enumeration: the all-bottom
    assignment is latency-minimal and always in stage one's space.
    """
    n = rng.randint(2, n_max)
    ids = [f"m{i:02d}" for i in range(n)]
    p0 = rng.uniform(2.0, 6.0)
    p1 = p0 * rng.uniform(0.4, 1.0)
    p2 = p1 * rng.uniform(0.4, 1.0)
    tiers = TierChain((Tier("c", 0, p0), Tier("b", 1, p1), Tier("a", 2, p2)))
    microservices = []
    for i, ms_id in enumerate(ids):
        t = rng.uniform(0.005, 0.05)
        bound = "c" if i == 0 and rng.random() < 0.5 else None
        times = {"c": t} if bound else {"c": t, "b": t, "a": t}
        microservices.append(MicroserviceSpec(id=ms_id, service_time_s=times, bound_tier=bound))
    links = tuple(
        CommLinkSpec(a, b, data_in_mbit=rng.uniform(0.0, 2.0), data_out_mbit=rng.uniform(0.0, 0.2))
        for a, b in zip(ids, ids[1:])
    )
    pipeline = CriticalPipeline("p0", tuple(ids), latency_constraint_s=1.0)
    app = ApplicationGraph("random3", tuple(microservices), links, (pipeline,))
    net = NetworkState(
        (
            TierPairLink("c", "b", rng.uniform(5.0, 60.0), rng.uniform(5.0, 60.0)),
            TierPairLink("b", "a", rng.uniform(2.0, 40.0), rng.uniform(2.0, 40.0)),
        )
    )
    weights = PricingWeights()
    ref = Placement({
        m.id: rng.choice(m.allowed_tiers(tiers)) for m in app.microservices
    })
    constraints = {
        "p0": naive_pipeline_latency(app, tiers, ref, net, pipeline) * rng.uniform(0.9, 1.5)
    }
    return app, tiers, net, weights, constraints
