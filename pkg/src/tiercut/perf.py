"""Weight, latency and cost formulas over a placed application graph.

A placed vertex costs service_time x tier price. A cut link costs
data_in / upload_bandwidth + data_out / download_bandwidth on the tier
pair it crosses; links between co-located vertices cost nothing.
Crossings that span non-adjacent tiers pay every hop along the chain.
Pipeline latency is the sum of the pipeline's vertex service times plus
the weights of its cut links; total cost is the weighted sum of vertex
costs, with one weight for the edge tier (rank 0) and one for everything
above it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    ApplicationGraph,
    CommLinkSpec,
    CriticalPipeline,
    MicroserviceSpec,
    ModelError,
    Placement,
    Tier,
    TierChain,
    check_placement,
    cut_edges,
)

# A dead link is represented by a tiny positive bandwidth so latencies
# become astronomically large but stay finite.
BANDWIDTH_FLOOR_MBPS = 1e-6


@dataclass(frozen=True)
class TierPairLink:
    """Network figures between two adjacent tiers (lower first)."""

    lo: str
    hi: str
    bw_up_mbps: float
    bw_down_mbps: float
    rtt_s: float = 0.0


@dataclass(frozen=True)
class NetworkState:
    """Bandwidth/latency state for every adjacent tier pair."""

    pairs: tuple[TierPairLink, ...]

    def pair(self, lo: str, hi: str) -> TierPairLink:
        for p in self.pairs:
            if p.lo == lo and p.hi == hi:
                return p
        raise ModelError(f"no network figures for tier pair ({lo!r}, {hi!r})")


@dataclass(frozen=True)
class PricingWeights:
    """Relative importance of edge vs upper-tier compute cost."""

    c_edge: float = 1.0
    c_cloud: float = 1.0

    def __post_init__(self) -> None:
        if self.c_edge < 0 or self.c_cloud < 0:
            raise ModelError("pricing weights must be >= 0")
        if self.c_edge == 0 and self.c_cloud == 0:
            raise ModelError("pricing weights cannot both be zero")


@dataclass(frozen=True)
class PipelineLatency:
    pipeline_id: str
    total_s: float
    edge_processing_s: float
    cloud_processing_s: float
    communication_s: float


@dataclass(frozen=True)
class LatencyReport:
    pipelines: tuple[PipelineLatency, ...]

    def for_pipeline(self, pipeline_id: str) -> PipelineLatency:
        for p in self.pipelines:
            if p.pipeline_id == pipeline_id:
                return p
        raise ModelError(f"no latency entry for pipeline {pipeline_id!r}")


@dataclass(frozen=True)
class CostReport:
    total: float
    contributions: dict[str, float] = field(default_factory=dict)


def vertex_weight(ms: MicroserviceSpec, tier: Tier) -> float:
    """Cost of running one unit of work of ms on tier."""
    return ms.time_at(tier.id) * tier.price_rate


def _effective(bw_mbps: float) -> float:
    return max(bw_mbps, BANDWIDTH_FLOOR_MBPS)


def comm_weight(
    link: CommLinkSpec, net: NetworkState, tiers: TierChain, tier_a: str, tier_b: str
) -> float:
    """Seconds to move one unit of the link's data across a crossing.

    tier_a/tier_b are the tiers of the link endpoints; the crossing pays
    data_in over the upload direction and data_out over the download
    direction of every hop between them.
    """
    lo_rank = tiers.rank_of(tier_a)
    hi_rank = tiers.rank_of(tier_b)
    if lo_rank == hi_rank:
        return 0.0
    if lo_rank > hi_rank:
        lo_rank, hi_rank = hi_rank, lo_rank
    total = 0.0
    for r in range(lo_rank, hi_rank):
        pair = net.pair(tiers.tiers[r].id, tiers.tiers[r + 1].id)
        total += link.data_in_mbit / _effective(pair.bw_up_mbps)
        total += link.data_out_mbit / _effective(pair.bw_down_mbps)
    return total


def pipeline_latency(
    app: ApplicationGraph,
    tiers: TierChain,
    placement: Placement,
    net: NetworkState,
    pipeline: CriticalPipeline | str,
) -> float:
    """End-to-end seconds per unit of work along one critical pipeline."""
    if isinstance(pipeline, str):
        pipeline = app.pipeline(pipeline)
    total = 0.0
    for ms_id in pipeline.path:
        ms = app.microservice(ms_id)
        total += ms.time_at(placement.tier_of(ms_id))
    for link in app.pipeline_links(pipeline):
        total += comm_weight(
            link, net, tiers, placement.tier_of(link.src), placement.tier_of(link.dst)
        )
    return total


def latency_report(
    app: ApplicationGraph, tiers: TierChain, placement: Placement, net: NetworkState
) -> LatencyReport:
    """Per-pipeline latency with its processing/communication decomposition."""
    check_placement(app, tiers, placement)
    edge_id = tiers.edge.id
    rows = []
    for pipe in app.pipelines:
        edge_p = 0.0
        cloud_p = 0.0
        comm = 0.0
        for ms_id in pipe.path:
            ms = app.microservice(ms_id)
            tier_id = placement.tier_of(ms_id)
            t = ms.time_at(tier_id)
            if tier_id == edge_id:
                edge_p += t
            else:
                cloud_p += t
        for link in app.pipeline_links(pipe):
            comm += comm_weight(
                link, net, tiers, placement.tier_of(link.src), placement.tier_of(link.dst)
            )
        rows.append(
            PipelineLatency(
                pipeline_id=pipe.id,
                total_s=edge_p + cloud_p + comm,
                edge_processing_s=edge_p,
                cloud_processing_s=cloud_p,
                communication_s=comm,
            )
        )
    return LatencyReport(tuple(rows))


def graph_latency(
    app: ApplicationGraph, tiers: TierChain, placement: Placement, net: NetworkState
) -> float:
    """Diagnostic whole-graph variant: sums every vertex and every cut link.

    The per-pipeline figures are what constraints are checked against;
    this exists only to inspect the full graph in one number.
    """
    cut = cut_edges(app, placement)
    total = 0.0
    for ms in app.microservices:
        total += ms.time_at(placement.tier_of(ms.id))
    for link in app.links:
        if link.key in cut:
            total += comm_weight(
                link, net, tiers, placement.tier_of(link.src), placement.tier_of(link.dst)
            )
    return total


def total_cost(
    app: ApplicationGraph,
    tiers: TierChain,
    placement: Placement,
    weights: PricingWeights = PricingWeights(),
) -> CostReport:
    """Weighted per-unit compute cost of the placement.

    c_edge applies to rank-0 vertices, c_cloud to every higher rank.
    Contributions are summed in sorted vertex order so equal inputs give
    bit-equal totals.
    """
    edge_id = tiers.edge.id
    contributions: dict[str, float] = {}
    total = 0.0
    for ms in sorted(app.microservices, key=lambda m: m.id):
        tier = tiers.by_id(placement.tier_of(ms.id))
        factor = weights.c_edge if tier.id == edge_id else weights.c_cloud
        c = factor * vertex_weight(ms, tier)
        contributions[ms.id] = c
        total += c
    return CostReport(total=total, contributions=contributions)
