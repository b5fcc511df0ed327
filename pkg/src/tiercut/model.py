"""Application graph, tiers, pipelines and placements.

The application is a directed graph of microservices. A subset of the
vertices forms one or more critical pipelines, each with an end-to-end
latency budget per unit of work. Compute tiers form an ordered chain
(rank 0 sits next to the data sources, higher ranks are progressively
cheaper and farther away). A placement assigns every microservice to a
tier; the cut is the set of links whose endpoints land on different
tiers.

All types here are immutable values: build once, share freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ModelError(Exception):
    """Base class for structural errors in graphs, tiers, or placements."""


class InvalidPlacementError(ModelError):
    pass


class UnsupportedTierError(ModelError):
    pass


class UnknownPipelineError(ModelError):
    pass


@dataclass(frozen=True)
class Tier:
    """One level of the compute hierarchy.

    rank 0 is the tier closest to the data source; ranks increase toward
    the central cloud. price_rate is currency per compute-second and must
    not increase with rank (upper tiers are cheaper).
    """

    id: str
    rank: int
    price_rate: float
    vcpus: float = 1e9  # scheduling capacity; effectively unbounded unless set


@dataclass(frozen=True)
class TierChain:
    """Ordered chain of tiers, validated on construction."""

    tiers: tuple[Tier, ...]

    def __post_init__(self) -> None:
        if len(self.tiers) < 2:
            raise ModelError("tier chain needs at least 2 tiers")
        ranks = [t.rank for t in self.tiers]
        if ranks != list(range(len(self.tiers))):
            raise ModelError(f"tier ranks must be contiguous from 0, got {ranks}")
        if len({t.id for t in self.tiers}) != len(self.tiers):
            raise ModelError("tier ids must be unique")
        for t in self.tiers:
            if t.price_rate <= 0:
                raise ModelError(f"tier {t.id}: price_rate must be > 0")
        for lo, hi in zip(self.tiers, self.tiers[1:]):
            if hi.price_rate > lo.price_rate:
                raise ModelError(
                    f"price_rate must be non-increasing with rank "
                    f"({lo.id}={lo.price_rate} < {hi.id}={hi.price_rate})"
                )

    def __iter__(self):
        return iter(self.tiers)

    def __len__(self) -> int:
        return len(self.tiers)

    def by_id(self, tier_id: str) -> Tier:
        for t in self.tiers:
            if t.id == tier_id:
                return t
        raise UnsupportedTierError(f"unknown tier {tier_id!r}")

    def rank_of(self, tier_id: str) -> int:
        return self.by_id(tier_id).rank

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.tiers)

    @property
    def edge(self) -> Tier:
        return self.tiers[0]


@dataclass(frozen=True)
class StatefulStore:
    """Marks a microservice as the master of a persistent store.

    Pipeline members with a store master above the pipeline's edge side
    are eligible for an edge proxy that terminates the pipeline locally.
    proxy_time_s is the proxy's per-unit service time (the proxy only
    buffers and republishes, so it defaults to free).
    """

    store_id: str
    proxy_time_s: float = 0.0


@dataclass(frozen=True)
class MicroserviceSpec:
    """A vertex of the application graph.

    service_time_s maps tier id -> seconds per unit of work; a tier
    missing from the map means the microservice cannot run there.
    bound_tier pins the microservice (e.g. it terminates device traffic).
    """

    id: str
    service_time_s: dict[str, float]
    bound_tier: str | None = None
    store: StatefulStore | None = None
    vcpus: float = 1.0

    def allowed_tiers(self, tiers: TierChain) -> tuple[str, ...]:
        """Tiers this microservice may occupy, in rank order."""
        if self.bound_tier is not None:
            return (self.bound_tier,)
        return tuple(t.id for t in tiers if t.id in self.service_time_s)

    def time_at(self, tier_id: str) -> float:
        try:
            return self.service_time_s[tier_id]
        except KeyError:
            raise UnsupportedTierError(
                f"microservice {self.id!r} has no service time at tier {tier_id!r}"
            ) from None


@dataclass(frozen=True)
class CommLinkSpec:
    """A communication link; weights only apply when the link is cut.

    data_in_mbit travels from the lower-tier endpoint to the higher one
    (upload direction), data_out_mbit comes back down.
    """

    src: str
    dst: str
    data_in_mbit: float = 0.0
    data_out_mbit: float = 0.0

    @property
    def key(self) -> tuple[str, str]:
        return (self.src, self.dst)


@dataclass(frozen=True)
class CriticalPipeline:
    """An ordered chain of microservices with a latency budget."""

    id: str
    path: tuple[str, ...]
    latency_constraint_s: float


@dataclass(frozen=True)
class ApplicationGraph:
    name: str
    microservices: tuple[MicroserviceSpec, ...]
    links: tuple[CommLinkSpec, ...]
    pipelines: tuple[CriticalPipeline, ...]

    def microservice(self, ms_id: str) -> MicroserviceSpec:
        for ms in self.microservices:
            if ms.id == ms_id:
                return ms
        raise ModelError(f"unknown microservice {ms_id!r}")

    def has_microservice(self, ms_id: str) -> bool:
        return any(ms.id == ms_id for ms in self.microservices)

    def link(self, src: str, dst: str) -> CommLinkSpec:
        for l in self.links:
            if l.src == src and l.dst == dst:
                return l
        raise ModelError(f"unknown link ({src!r}, {dst!r})")

    def has_link(self, src: str, dst: str) -> bool:
        return any(l.src == src and l.dst == dst for l in self.links)

    def pipeline(self, pipeline_id: str) -> CriticalPipeline:
        for p in self.pipelines:
            if p.id == pipeline_id:
                return p
        raise UnknownPipelineError(f"unknown pipeline {pipeline_id!r}")

    def pipeline_links(self, pipeline: CriticalPipeline) -> tuple[CommLinkSpec, ...]:
        return tuple(self.link(a, b) for a, b in zip(pipeline.path, pipeline.path[1:]))


@dataclass(frozen=True)
class Placement:
    """Total assignment of microservice id -> tier id."""

    assignment: dict[str, str] = field(default_factory=dict)

    def tier_of(self, ms_id: str) -> str:
        try:
            return self.assignment[ms_id]
        except KeyError:
            raise InvalidPlacementError(f"placement misses microservice {ms_id!r}") from None

    def with_moves(self, moves: dict[str, str]) -> "Placement":
        merged = dict(self.assignment)
        merged.update(moves)
        return Placement(merged)

    def tag(self, path: tuple[str, ...] | None = None) -> str:
        """Compact human-readable signature, stable across runs."""
        ids = path if path is not None else tuple(sorted(self.assignment))
        return "|".join(f"{m}:{self.assignment[m]}" for m in ids)


@dataclass(frozen=True)
class Violation:
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.message}"


def validate_application(app: ApplicationGraph) -> list[Violation]:
    """Structural validation; returns an empty list iff the graph is well formed.

    Violations are data, not exceptions: the report names every offending
    entity so a scenario author can fix them all in one pass.
    """
    out: list[Violation] = []
    ids = [ms.id for ms in app.microservices]
    seen: set[str] = set()
    for ms_id in ids:
        if ms_id in seen:
            out.append(Violation(ms_id, "duplicate microservice id"))
        seen.add(ms_id)

    for ms in app.microservices:
        if not ms.service_time_s:
            out.append(Violation(ms.id, "no service time declared for any tier"))
        for tier_id, t in ms.service_time_s.items():
            if t < 0:
                out.append(Violation(ms.id, f"negative service time at tier {tier_id!r}"))
        if ms.bound_tier is not None and ms.bound_tier not in ms.service_time_s:
            out.append(
                Violation(ms.id, f"bound to tier {ms.bound_tier!r} but has no service time there")
            )
        if ms.vcpus <= 0:
            out.append(Violation(ms.id, "vcpus must be > 0"))

    link_keys: set[tuple[str, str]] = set()
    for link in app.links:
        name = f"({link.src},{link.dst})"
        if link.src == link.dst:
            out.append(Violation(name, "self-loop"))
        for end in (link.src, link.dst):
            if end not in seen:
                out.append(Violation(name, f"endpoint {end!r} is not a declared microservice"))
        if link.key in link_keys:
            out.append(Violation(name, "duplicate link"))
        link_keys.add(link.key)
        if link.data_in_mbit < 0 or link.data_out_mbit < 0:
            out.append(Violation(name, "data volumes must be >= 0"))

    for pipe in app.pipelines:
        if not pipe.path:
            out.append(Violation(pipe.id, "pipeline path is empty"))
            continue
        if pipe.latency_constraint_s <= 0:
            out.append(Violation(pipe.id, "latency constraint must be > 0"))
        for ms_id in pipe.path:
            if ms_id not in seen:
                out.append(Violation(pipe.id, f"pipeline path references unknown microservice {ms_id!r}"))
        for a, b in zip(pipe.path, pipe.path[1:]):
            if a in seen and b in seen and not app.has_link(a, b):
                out.append(Violation(pipe.id, f"pipeline edge ({a},{b}) is not a declared link"))
    return out


def check_placement(app: ApplicationGraph, tiers: TierChain, placement: Placement) -> None:
    """Raise InvalidPlacementError unless the placement is total and legal."""
    known = {ms.id for ms in app.microservices}
    for ms_id in placement.assignment:
        if ms_id not in known:
            raise InvalidPlacementError(f"placement names unknown microservice {ms_id!r}")
    for ms in app.microservices:
        tier_id = placement.tier_of(ms.id)
        tiers.by_id(tier_id)
        if ms.bound_tier is not None and tier_id != ms.bound_tier:
            raise InvalidPlacementError(
                f"microservice {ms.id!r} is bound to {ms.bound_tier!r} but placed at {tier_id!r}"
            )
        if tier_id not in ms.service_time_s:
            raise InvalidPlacementError(
                f"microservice {ms.id!r} placed at {tier_id!r} where it has no service time"
            )


def cut_edges(app: ApplicationGraph, placement: Placement) -> set[tuple[str, str]]:
    """Links whose endpoints are assigned different tiers."""
    for link in app.links:
        placement.tier_of(link.src)
        placement.tier_of(link.dst)
    return {
        link.key
        for link in app.links
        if placement.tier_of(link.src) != placement.tier_of(link.dst)
    }


def derive_flags(
    app: ApplicationGraph, placement: Placement, edge_tier: str
) -> tuple[dict[str, int], dict[tuple[str, str], int]]:
    """Per-vertex edge-residency flags and per-link cut flags.

    The vertex flag is 1 iff the vertex sits on edge_tier; the link flag
    is 1 iff the link is in the cut.
    """
    cut = cut_edges(app, placement)
    f_v = {ms.id: 1 if placement.tier_of(ms.id) == edge_tier else 0 for ms in app.microservices}
    f_e = {link.key: 1 if link.key in cut else 0 for link in app.links}
    return f_v, f_e

