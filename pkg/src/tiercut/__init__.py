"""tiercut: latency-constrained, cost-minimizing placement of microservice
graphs across edge/cloud tiers, with a deterministic simulator, a
runtime scheduling loop, and a deployment cost estimator."""

from .costs import (
    DeploymentPlan,
    InstanceType,
    MonthlyCost,
    PlanRow,
    SizingRules,
    compare_plans,
    instances_required,
    monthly_cost,
)
from .model import (
    ApplicationGraph,
    CommLinkSpec,
    CriticalPipeline,
    MicroserviceSpec,
    Placement,
    StatefulStore,
    Tier,
    TierChain,
    cut_edges,
    derive_flags,
    validate_application,
)
from .monitor import EwmaEstimator, MetricsSnapshot, MonitorState, observe
from .partition import (
    PartitionProblem,
    PartitionResult,
    ProxyRule,
    ProxySyncConfig,
    insert_proxies,
    partition,
    partition_multi_tier,
)
from .perf import (
    CostReport,
    LatencyReport,
    NetworkState,
    PricingWeights,
    TierPairLink,
    comm_weight,
    graph_latency,
    latency_report,
    pipeline_latency,
    total_cost,
    vertex_weight,
)
from .scenario import Scenario, ScenarioError, load_bundled, load_scenario, parse_scenario
from .scheduling import (
    DeployRequest,
    MigrationPlan,
    Scheduler,
    SchedulerConfig,
    ZoneRegistry,
    apply_placement,
    conditions_changed,
    handle_deploy_request,
    run_scheduling_loop,
)
from .sim import Simulation, SimResults
from .traces import TraceSeries, transfer_time

__version__ = "0.1.0"

__all__ = [
    "ApplicationGraph",
    "CommLinkSpec",
    "CostReport",
    "CriticalPipeline",
    "DeployRequest",
    "DeploymentPlan",
    "EwmaEstimator",
    "InstanceType",
    "LatencyReport",
    "MetricsSnapshot",
    "MicroserviceSpec",
    "MigrationPlan",
    "MonitorState",
    "MonthlyCost",
    "NetworkState",
    "PartitionProblem",
    "PartitionResult",
    "Placement",
    "PlanRow",
    "PricingWeights",
    "ProxyRule",
    "ProxySyncConfig",
    "Scenario",
    "ScenarioError",
    "Scheduler",
    "SchedulerConfig",
    "Simulation",
    "SimResults",
    "SizingRules",
    "StatefulStore",
    "Tier",
    "TierChain",
    "TierPairLink",
    "TraceSeries",
    "ZoneRegistry",
    "apply_placement",
    "comm_weight",
    "compare_plans",
    "conditions_changed",
    "cut_edges",
    "derive_flags",
    "graph_latency",
    "handle_deploy_request",
    "insert_proxies",
    "instances_required",
    "latency_report",
    "load_bundled",
    "load_scenario",
    "monthly_cost",
    "observe",
    "parse_scenario",
    "partition",
    "partition_multi_tier",
    "pipeline_latency",
    "run_scheduling_loop",
    "total_cost",
    "transfer_time",
    "validate_application",
    "vertex_weight",
]
