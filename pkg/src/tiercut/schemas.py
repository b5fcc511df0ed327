"""Request/response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class ScenarioRef(BaseModel):
    """A scenario, inline or by path. Exactly one must be given."""

    scenario: dict | None = None
    scenario_path: str | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.scenario is None) == (self.scenario_path is None):
            raise ValueError("provide exactly one of 'scenario' or 'scenario_path'")
        return self


class PartitionRequest(ScenarioRef):
    multi_tier: bool = False
    exact_only: bool = False
    constraint_s: float | None = Field(default=None, gt=0)


class PipelineLatencyModel(BaseModel):
    pipeline: str
    latency_s: float
    constraint_s: float
    meets_constraint: bool


class PartitionResponse(BaseModel):
    scenario: str
    feasible: bool
    solver: str
    cost: float
    placement: dict[str, str]
    latencies: list[PipelineLatencyModel]
    violated_pipeline: str | None = None
    proxies: list[str] = []


class ReplayRequest(PartitionRequest):
    at_s: float = Field(default=0.0, ge=0)


class ReplayResponse(PartitionResponse):
    at_s: float
    bandwidth_mbps: dict[str, float] = {}


class SimulateRequest(ScenarioRef):
    duration_s: float = Field(ge=0)
    seed: int = 0
    dynamic: bool = True
    include_csv: bool = True
    metrics: bool = False


class PipelineSummaryModel(BaseModel):
    pipeline: str
    units_completed: int
    p50_ms: float
    p95_ms: float
    max_ms: float
    violation_s: float
    constraint_s: float


class SimulateResponse(BaseModel):
    scenario: str
    duration_s: float
    seed: int
    dynamic: bool
    units_emitted: int
    units_completed: int
    units_in_flight: int
    remap_count: int
    sync_wan_mbit: float
    pipelines: list[PipelineSummaryModel]
    latency_csv: str | None = None
    links_csv: str | None = None
    events_csv: str | None = None
    metrics_csv: str | None = None


class CostRequest(ScenarioRef):
    pass


class PlanCostModel(BaseModel):
    plan: str
    hourly: float
    compute: float
    storage: float
    total: float


class CostResponse(BaseModel):
    scenario: str
    plans: list[PlanCostModel]
    csv: str


class EventModel(BaseModel):
    time_s: float
    app: str
    event_type: str
    detail: str


class DeployRequestModel(ScenarioRef):
    region: str


class DeployResponse(BaseModel):
    ok: bool
    error: str | None = None
    zones_created: list[str]
    zones_reused: list[str]
    vms_created: list[str]
    vms_reused: list[str]
    placement: dict[str, str] | None = None
    events: list[EventModel]


class RegistryVmModel(BaseModel):
    id: str
    vcpus: float
    used_vcpus: float
    healthy: bool


class RegistryZoneModel(BaseModel):
    id: str
    kind: str
    region: str
    reachable: bool
    vms: list[RegistryVmModel]


class RegistryResponse(BaseModel):
    zones: list[RegistryZoneModel]
