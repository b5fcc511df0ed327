"""Declarative scenario files: one strict JSON document per experiment.

A scenario bundles tiers, network figures (inline or a named fixture
such as "location-1"), the application graph, bandwidth/health traces,
workload generators, scheduler settings, deployment cost plans and
deploy requests. Parsing is strict: unknown keys, wrong types and
dangling references all fail up front with the JSON path of the
offending entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .costs import (
    INSTANCE_CATALOG,
    STORAGE_MONTH,
    DeploymentPlan,
    DeploymentSection,
    InstanceType,
    PlanRow,
    SizingRules,
)
from .model import (
    ApplicationGraph,
    CommLinkSpec,
    CriticalPipeline,
    MicroserviceSpec,
    StatefulStore,
    Tier,
    TierChain,
    validate_application,
)
from .partition import ProxySyncConfig
from .perf import NetworkState, PricingWeights, TierPairLink
from .scheduling import SchedulerConfig
from .traces import TraceSeries

NETWORK_FIXTURES = ("location-1", "location-2")


class ScenarioError(Exception):
    """Parse or reference failure, tagged with the JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class BandwidthTrace:
    lo: str
    hi: str
    direction: str  # "up" | "down"
    series: TraceSeries


@dataclass(frozen=True)
class HealthTrace:
    zone: str
    series: TraceSeries


@dataclass(frozen=True)
class FrameSource:
    pipeline: str
    period_s: float
    start_s: float = 0.0
    count: int | None = None
    ingest_mbit: float = 0.0
    from_tier: str | None = None


@dataclass(frozen=True)
class FileUpload:
    pipeline: str
    size_mbit: float
    from_tier: str
    start_s: float = 0.0


@dataclass(frozen=True)
class RequestSpec:
    region: str
    app: str


@dataclass(frozen=True)
class Scenario:
    name: str
    source: str
    tiers: TierChain | None = None
    net: NetworkState | None = None
    app: ApplicationGraph | None = None
    weights: PricingWeights = PricingWeights()
    bandwidth_traces: tuple[BandwidthTrace, ...] = ()
    health_traces: tuple[HealthTrace, ...] = ()
    frame_sources: tuple[FrameSource, ...] = ()
    file_uploads: tuple[FileUpload, ...] = ()
    scheduler_config: SchedulerConfig = SchedulerConfig()
    proxy_sync: ProxySyncConfig = ProxySyncConfig()
    deployment: DeploymentSection | None = None
    requests: tuple[RequestSpec, ...] = ()

    def require(self, *sections: str) -> None:
        for section in sections:
            if getattr(self, section) is None:
                raise ScenarioError(section, f"scenario {self.name!r} has no {section} section")


# --- strict-access helpers ---------------------------------------------------


def _obj(value, path: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(path, f"expected an object, got {type(value).__name__}")
    for key in value:
        if key not in allowed:
            raise ScenarioError(path, f"unknown key {key!r} (allowed: {sorted(allowed)})")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(path, f"expected a list, got {type(value).__name__}")
    return value


def _num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ScenarioError(path, f"expected a string, got {type(value).__name__}")
    return value


def _bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ScenarioError(path, f"expected a boolean, got {type(value).__name__}")
    return value


# --- section parsers ---------------------------------------------------------


def _parse_tiers(raw, path: str) -> TierChain:
    tiers = []
    for i, item in enumerate(_list(raw, path)):
        p = f"{path}[{i}]"
        obj = _obj(item, p, {"id", "rank", "price_rate", "vcpus"})
        tiers.append(
            Tier(
                id=_str(obj.get("id"), f"{p}.id"),
                rank=_int(obj.get("rank"), f"{p}.rank"),
                price_rate=_num(obj.get("price_rate"), f"{p}.price_rate"),
                vcpus=_num(obj.get("vcpus", 1e9), f"{p}.vcpus"),
            )
        )
    tiers.sort(key=lambda t: t.rank)
    try:
        return TierChain(tuple(tiers))
    except Exception as exc:
        raise ScenarioError(path, str(exc)) from None


def load_network_fixture(name: str) -> dict:
    if name not in NETWORK_FIXTURES:
        raise ScenarioError("network.fixture", f"unknown network fixture {name!r}")
    text = resources.files("tiercut.fixtures.networks").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def _parse_network(raw, path: str, tiers: TierChain | None) -> NetworkState:
    obj = _obj(raw, path, {"fixture", "pairs"})
    if ("fixture" in obj) == ("pairs" in obj):
        raise ScenarioError(path, "declare exactly one of 'fixture' or 'pairs'")
    if "fixture" in obj:
        fixture = load_network_fixture(_str(obj["fixture"], f"{path}.fixture"))
        pairs_raw = fixture["pairs"]
    else:
        pairs_raw = obj["pairs"]
    pairs = []
    for i, item in enumerate(_list(pairs_raw, f"{path}.pairs")):
        p = f"{path}.pairs[{i}]"
        entry = _obj(item, p, {"from", "to", "bw_up_mbps", "bw_down_mbps", "rtt_s"})
        pairs.append(
            TierPairLink(
                lo=_str(entry.get("from"), f"{p}.from"),
                hi=_str(entry.get("to"), f"{p}.to"),
                bw_up_mbps=_num(entry.get("bw_up_mbps"), f"{p}.bw_up_mbps"),
                bw_down_mbps=_num(entry.get("bw_down_mbps"), f"{p}.bw_down_mbps"),
                rtt_s=_num(entry.get("rtt_s", 0.0), f"{p}.rtt_s"),
            )
        )
    for pair in pairs:
        if pair.bw_up_mbps <= 0 or pair.bw_down_mbps <= 0:
            raise ScenarioError(path, f"bandwidths must be > 0 on ({pair.lo}, {pair.hi})")
    if tiers is not None:
        keep = []
        for lo, hi in zip(tiers.ids, tiers.ids[1:]):
            match = [p for p in pairs if p.lo == lo and p.hi == hi]
            if not match:
                raise ScenarioError(path, f"no figures for adjacent tier pair ({lo}, {hi})")
            keep.append(match[0])
        return NetworkState(tuple(keep))
    return NetworkState(tuple(pairs))


def _parse_application(raw, path: str, tiers: TierChain | None) -> tuple[ApplicationGraph, ProxySyncConfig]:
    obj = _obj(raw, path, {"name", "microservices", "links", "pipelines", "proxy_sync"})
    microservices = []
    for i, item in enumerate(_list(obj.get("microservices", []), f"{path}.microservices")):
        p = f"{path}.microservices[{i}]"
        entry = _obj(item, p, {"id", "service_time_s", "bound_tier", "vcpus", "store"})
        times_raw = entry.get("service_time_s")
        if not isinstance(times_raw, dict):
            raise ScenarioError(f"{p}.service_time_s", "expected an object of tier -> seconds")
        times = {k: _num(v, f"{p}.service_time_s.{k}") for k, v in times_raw.items()}
        if tiers is not None:
            for tier_id in times:
                if tier_id not in tiers.ids:
                    raise ScenarioError(f"{p}.service_time_s", f"unknown tier {tier_id!r}")
        store = None
        if "store" in entry:
            s = _obj(entry["store"], f"{p}.store", {"id", "proxy_time_s"})
            store = StatefulStore(
                store_id=_str(s.get("id"), f"{p}.store.id"),
                proxy_time_s=_num(s.get("proxy_time_s", 0.0), f"{p}.store.proxy_time_s"),
            )
        microservices.append(
            MicroserviceSpec(
                id=_str(entry.get("id"), f"{p}.id"),
                service_time_s=times,
                bound_tier=_str(entry["bound_tier"], f"{p}.bound_tier") if "bound_tier" in entry else None,
                store=store,
                vcpus=_num(entry.get("vcpus", 1.0), f"{p}.vcpus"),
            )
        )
    links = []
    for i, item in enumerate(_list(obj.get("links", []), f"{path}.links")):
        p = f"{path}.links[{i}]"
        entry = _obj(item, p, {"from", "to", "data_in_mbit", "data_out_mbit"})
        links.append(
            CommLinkSpec(
                src=_str(entry.get("from"), f"{p}.from"),
                dst=_str(entry.get("to"), f"{p}.to"),
                data_in_mbit=_num(entry.get("data_in_mbit", 0.0), f"{p}.data_in_mbit"),
                data_out_mbit=_num(entry.get("data_out_mbit", 0.0), f"{p}.data_out_mbit"),
            )
        )
    pipelines = []
    for i, item in enumerate(_list(obj.get("pipelines", []), f"{path}.pipelines")):
        p = f"{path}.pipelines[{i}]"
        entry = _obj(item, p, {"id", "path", "latency_constraint_s"})
        pipelines.append(
            CriticalPipeline(
                id=_str(entry.get("id"), f"{p}.id"),
                path=tuple(_str(m, f"{p}.path[{j}]") for j, m in enumerate(_list(entry.get("path"), f"{p}.path"))),
                latency_constraint_s=_num(entry.get("latency_constraint_s"), f"{p}.latency_constraint_s"),
            )
        )
    app = ApplicationGraph(
        name=_str(obj.get("name", "application"), f"{path}.name"),
        microservices=tuple(microservices),
        links=tuple(links),
        pipelines=tuple(pipelines),
    )
    violations = validate_application(app)
    if violations:
        raise ScenarioError(path, "; ".join(str(v) for v in violations))

    sync = ProxySyncConfig()
    if "proxy_sync" in obj:
        p = f"{path}.proxy_sync"
        entry = _obj(obj["proxy_sync"], p,
                     {"sync_interval_s", "batch_size", "record_mbit", "overhead_mbit", "batching"})
        sync = ProxySyncConfig(
            sync_interval_s=_num(entry.get("sync_interval_s", sync.sync_interval_s), f"{p}.sync_interval_s"),
            batch_size=_int(entry.get("batch_size", sync.batch_size), f"{p}.batch_size"),
            record_mbit=_num(entry.get("record_mbit", sync.record_mbit), f"{p}.record_mbit"),
            overhead_mbit=_num(entry.get("overhead_mbit", sync.overhead_mbit), f"{p}.overhead_mbit"),
            batching=_bool(entry.get("batching", sync.batching), f"{p}.batching"),
        )
    return app, sync


def _parse_traces(raw, path: str, tiers: TierChain | None) -> tuple[tuple[BandwidthTrace, ...], tuple[HealthTrace, ...]]:
    bandwidth: list[BandwidthTrace] = []
    health: list[HealthTrace] = []
    for i, item in enumerate(_list(raw, path)):
        p = f"{path}[{i}]"
        entry = _obj(item, p, {"target", "link", "direction", "zone", "points"})
        target = _str(entry.get("target"), f"{p}.target")
        points_raw = _list(entry.get("points"), f"{p}.points")
        points = []
        for j, pt in enumerate(points_raw):
            pt_path = f"{p}.points[{j}]"
            if not isinstance(pt, list) or len(pt) != 2:
                raise ScenarioError(pt_path, "expected [time_s, value]")
            points.append((_num(pt[0], pt_path), _num(pt[1], pt_path)))
        try:
            series = TraceSeries(tuple(points))
        except ValueError as exc:
            raise ScenarioError(f"{p}.points", str(exc)) from None
        if target == "bandwidth":
            link = _list(entry.get("link"), f"{p}.link")
            if len(link) != 2:
                raise ScenarioError(f"{p}.link", "expected [lower_tier, higher_tier]")
            lo, hi = _str(link[0], f"{p}.link[0]"), _str(link[1], f"{p}.link[1]")
            if tiers is not None and (lo not in tiers.ids or hi not in tiers.ids):
                raise ScenarioError(f"{p}.link", f"unknown tier in ({lo}, {hi})")
            direction = _str(entry.get("direction"), f"{p}.direction")
            if direction not in ("up", "down"):
                raise ScenarioError(f"{p}.direction", "must be 'up' or 'down'")
            bandwidth.append(BandwidthTrace(lo=lo, hi=hi, direction=direction, series=series))
        elif target == "health":
            health.append(HealthTrace(zone=_str(entry.get("zone"), f"{p}.zone"), series=series))
        else:
            raise ScenarioError(f"{p}.target", "must be 'bandwidth' or 'health'")
    return tuple(bandwidth), tuple(health)


def _parse_workloads(raw, path: str, app: ApplicationGraph | None, tiers: TierChain | None):
    obj = _obj(raw, path, {"frames", "file_uploads"})
    frames = []
    for i, item in enumerate(_list(obj.get("frames", []), f"{path}.frames")):
        p = f"{path}.frames[{i}]"
        entry = _obj(item, p, {"pipeline", "period_s", "fps", "start_s", "count", "ingest_mbit", "from_tier"})
        if "period_s" in entry and "fps" in entry:
            raise ScenarioError(p, "declare at most one of 'period_s' and 'fps'")
        if "fps" in entry:
            period = 1.0 / _num(entry["fps"], f"{p}.fps")
        elif "period_s" in entry:
            period = _num(entry["period_s"], f"{p}.period_s")
        else:
            period = 1.0 / 30.0  # full-HD camera default
        frames.append(
            FrameSource(
                pipeline=_str(entry.get("pipeline"), f"{p}.pipeline"),
                period_s=period,
                start_s=_num(entry.get("start_s", 0.0), f"{p}.start_s"),
                count=_int(entry["count"], f"{p}.count") if "count" in entry else None,
                ingest_mbit=_num(entry.get("ingest_mbit", 0.0), f"{p}.ingest_mbit"),
                from_tier=_str(entry["from_tier"], f"{p}.from_tier") if "from_tier" in entry else None,
            )
        )
    uploads = []
    for i, item in enumerate(_list(obj.get("file_uploads", []), f"{path}.file_uploads")):
        p = f"{path}.file_uploads[{i}]"
        entry = _obj(item, p, {"pipeline", "size_mbit", "start_s", "from_tier"})
        uploads.append(
            FileUpload(
                pipeline=_str(entry.get("pipeline"), f"{p}.pipeline"),
                size_mbit=_num(entry.get("size_mbit"), f"{p}.size_mbit"),
                start_s=_num(entry.get("start_s", 0.0), f"{p}.start_s"),
                from_tier=_str(entry.get("from_tier"), f"{p}.from_tier"),
            )
        )
    for w in frames + uploads:
        if app is None or not any(pp.id == w.pipeline for pp in app.pipelines):
            raise ScenarioError(path, f"workload references unknown pipeline {w.pipeline!r}")
        if w.from_tier is not None and tiers is not None and w.from_tier not in tiers.ids:
            raise ScenarioError(path, f"workload references unknown tier {w.from_tier!r}")
    return tuple(frames), tuple(uploads)


def _parse_scheduler(raw, path: str) -> SchedulerConfig:
    entry = _obj(raw, path, {"interval_s", "hysteresis_margin", "improvement_threshold",
                             "activation_delay_s", "report_period_s", "ewma_alpha"})
    base = SchedulerConfig()
    try:
        return SchedulerConfig(
            interval_s=_num(entry.get("interval_s", base.interval_s), f"{path}.interval_s"),
            hysteresis_margin=_num(entry.get("hysteresis_margin", base.hysteresis_margin), f"{path}.hysteresis_margin"),
            improvement_threshold=_num(entry.get("improvement_threshold", base.improvement_threshold), f"{path}.improvement_threshold"),
            activation_delay_s=_num(entry.get("activation_delay_s", base.activation_delay_s), f"{path}.activation_delay_s"),
            report_period_s=_num(entry.get("report_period_s", base.report_period_s), f"{path}.report_period_s"),
            ewma_alpha=_num(entry.get("ewma_alpha", base.ewma_alpha), f"{path}.ewma_alpha"),
        )
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None


def _parse_deployment(raw, path: str) -> DeploymentSection:
    obj = _obj(raw, path, {"sizing", "storage_month", "instances", "plans"})
    sizing = SizingRules()
    if "sizing" in obj:
        p = f"{path}.sizing"
        entry = _obj(obj["sizing"], p, {"cameras_per_processing_vm", "relay_link_mbps", "camera_mbps"})
        sizing = SizingRules(
            cameras_per_processing_vm=_int(entry.get("cameras_per_processing_vm", sizing.cameras_per_processing_vm), f"{p}.cameras_per_processing_vm"),
            relay_link_mbps=_num(entry.get("relay_link_mbps", sizing.relay_link_mbps), f"{p}.relay_link_mbps"),
            camera_mbps=_num(entry.get("camera_mbps", sizing.camera_mbps), f"{p}.camera_mbps"),
        )
    storage = dict(STORAGE_MONTH)
    if "storage_month" in obj:
        p = f"{path}.storage_month"
        entry = _obj(obj["storage_month"], p, {"wavelength", "availability"})
        for kind, v in entry.items():
            storage[kind] = _num(v, f"{p}.{kind}")
    catalog = dict(INSTANCE_CATALOG)
    if "instances" in obj:
        for i, item in enumerate(_list(obj["instances"], f"{path}.instances")):
            p = f"{path}.instances[{i}]"
            entry = _obj(item, p, {"name", "vcpus", "memory_gib", "gpu", "network_gbit", "price_per_hour"})
            prices_raw = entry.get("price_per_hour")
            if not isinstance(prices_raw, dict):
                raise ScenarioError(f"{p}.price_per_hour", "expected an object of zone kind -> $/h")
            itype = InstanceType(
                name=_str(entry.get("name"), f"{p}.name"),
                vcpus=_int(entry.get("vcpus", 0), f"{p}.vcpus"),
                memory_gib=_num(entry.get("memory_gib", 0.0), f"{p}.memory_gib"),
                gpu=_bool(entry.get("gpu", False), f"{p}.gpu"),
                network_gbit=_str(entry.get("network_gbit", ""), f"{p}.network_gbit"),
                price_per_hour={k: _num(v, f"{p}.price_per_hour.{k}") for k, v in prices_raw.items()},
            )
            catalog[itype.name] = itype
    plans = []
    for i, item in enumerate(_list(obj.get("plans", []), f"{path}.plans")):
        p = f"{path}.plans[{i}]"
        entry = _obj(item, p, {"name", "cameras", "rows"})
        rows = []
        for j, row_raw in enumerate(_list(entry.get("rows"), f"{p}.rows")):
            rp = f"{p}.rows[{j}]"
            row = _obj(row_raw, rp, {"instance_type", "zone", "count", "role"})
            if ("count" in row) == ("role" in row):
                raise ScenarioError(rp, "declare exactly one of 'count' or 'role'")
            itype = _str(row.get("instance_type"), f"{rp}.instance_type")
            if itype not in catalog:
                raise ScenarioError(f"{rp}.instance_type", f"unknown instance type {itype!r}")
            zone = _str(row.get("zone"), f"{rp}.zone")
            if zone not in ("wavelength", "availability"):
                raise ScenarioError(f"{rp}.zone", "must be 'wavelength' or 'availability'")
            rows.append(
                PlanRow(
                    instance_type=itype,
                    zone_kind=zone,
                    count=_int(row["count"], f"{rp}.count") if "count" in row else None,
                    role=_str(row["role"], f"{rp}.role") if "role" in row else None,
                )
            )
        plans.append(
            DeploymentPlan(
                name=_str(entry.get("name"), f"{p}.name"),
                cameras=_int(entry.get("cameras", 0), f"{p}.cameras"),
                rows=tuple(rows),
            )
        )
    return DeploymentSection(plans=tuple(plans), sizing=sizing, storage_month=storage, catalog=catalog)


def _parse_requests(raw, path: str) -> tuple[RequestSpec, ...]:
    out = []
    for i, item in enumerate(_list(raw, path)):
        p = f"{path}[{i}]"
        entry = _obj(item, p, {"region", "app"})
        out.append(
            RequestSpec(
                region=_str(entry.get("region"), f"{p}.region"),
                app=_str(entry.get("app"), f"{p}.app"),
            )
        )
    return tuple(out)


# --- top level ----------------------------------------------------------------


_SECTIONS = {"name", "tiers", "network", "application", "weights", "traces",
             "workloads", "scheduler", "deployment", "requests"}


def parse_scenario(doc: dict, source: str = "<inline>") -> Scenario:
    obj = _obj(doc, "$", _SECTIONS)
    name = _str(obj.get("name", "scenario"), "$.name")
    tiers = _parse_tiers(obj["tiers"], "$.tiers") if "tiers" in obj else None
    net = _parse_network(obj["network"], "$.network", tiers) if "network" in obj else None
    app = None
    proxy_sync = ProxySyncConfig()
    if "application" in obj:
        app, proxy_sync = _parse_application(obj["application"], "$.application", tiers)
        if tiers is not None:
            for ms in app.microservices:
                if not ms.allowed_tiers(tiers):
                    raise ScenarioError(
                        "$.application", f"microservice {ms.id!r} cannot run on any declared tier"
                    )
    weights = PricingWeights()
    if "weights" in obj:
        entry = _obj(obj["weights"], "$.weights", {"c_edge", "c_cloud"})
        weights = PricingWeights(
            c_edge=_num(entry.get("c_edge", 1.0), "$.weights.c_edge"),
            c_cloud=_num(entry.get("c_cloud", 1.0), "$.weights.c_cloud"),
        )
    bandwidth_traces: tuple[BandwidthTrace, ...] = ()
    health_traces: tuple[HealthTrace, ...] = ()
    if "traces" in obj:
        bandwidth_traces, health_traces = _parse_traces(obj["traces"], "$.traces", tiers)
    frames: tuple[FrameSource, ...] = ()
    uploads: tuple[FileUpload, ...] = ()
    if "workloads" in obj:
        frames, uploads = _parse_workloads(obj["workloads"], "$.workloads", app, tiers)
    sched = _parse_scheduler(obj["scheduler"], "$.scheduler") if "scheduler" in obj else SchedulerConfig()
    deployment = _parse_deployment(obj["deployment"], "$.deployment") if "deployment" in obj else None
    requests = _parse_requests(obj["requests"], "$.requests") if "requests" in obj else ()
    if net is not None and tiers is None:
        raise ScenarioError("$.network", "network requires a tiers section")
    return Scenario(
        name=name,
        source=source,
        tiers=tiers,
        net=net,
        app=app,
        weights=weights,
        bandwidth_traces=bandwidth_traces,
        health_traces=health_traces,
        frame_sources=frames,
        file_uploads=uploads,
        scheduler_config=sched,
        proxy_sync=proxy_sync,
        deployment=deployment,
        requests=requests,
    )


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(str(p), f"cannot read scenario: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{p}:{exc.lineno}", f"invalid JSON: {exc.msg}") from None
    return parse_scenario(doc, source=str(p))


def bundled_scenarios() -> dict[str, Path]:
    """Name -> path of every scenario shipped with the package."""
    base = resources.files("tiercut.fixtures.scenarios")
    out = {}
    for entry in sorted(base.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name[: -len(".json")]] = Path(str(entry))
    return out


def load_bundled(name: str) -> Scenario:
    paths = bundled_scenarios()
    if name not in paths:
        raise ScenarioError("$", f"unknown bundled scenario {name!r} (have: {sorted(paths)})")
    return load_scenario(paths[name])


# --- serialization (round-trips through parse_scenario) -----------------------


def application_to_dict(app: ApplicationGraph, proxy_sync: ProxySyncConfig | None = None) -> dict:
    ms_items = []
    for ms in app.microservices:
        item: dict = {"id": ms.id, "service_time_s": dict(ms.service_time_s)}
        if ms.bound_tier is not None:
            item["bound_tier"] = ms.bound_tier
        if ms.vcpus != 1.0:
            item["vcpus"] = ms.vcpus
        if ms.store is not None:
            item["store"] = {"id": ms.store.store_id, "proxy_time_s": ms.store.proxy_time_s}
        ms_items.append(item)
    doc = {
        "name": app.name,
        "microservices": ms_items,
        "links": [
            {"from": l.src, "to": l.dst, "data_in_mbit": l.data_in_mbit, "data_out_mbit": l.data_out_mbit}
            for l in app.links
        ],
        "pipelines": [
            {"id": p.id, "path": list(p.path), "latency_constraint_s": p.latency_constraint_s}
            for p in app.pipelines
        ],
    }
    if proxy_sync is not None:
        doc["proxy_sync"] = {
            "sync_interval_s": proxy_sync.sync_interval_s,
            "batch_size": proxy_sync.batch_size,
            "record_mbit": proxy_sync.record_mbit,
            "overhead_mbit": proxy_sync.overhead_mbit,
            "batching": proxy_sync.batching,
        }
    return doc
