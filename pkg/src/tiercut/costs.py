"""Deployment-scale monthly cost model for camera-analytics fleets.

Compute is priced per instance-hour by zone kind and billed over a
720-hour month (the deployment table's compute column is exactly hourly
price x 720). Storage is a flat per-instance-month rate per zone kind;
the default rates are back-solved from the table's three deployment
rows. Data transfer is priced at zero: inbound is free and the alert
traffic out stays under the free tier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

HOURS_PER_MONTH = 720


class CostError(Exception):
    pass


@dataclass(frozen=True)
class InstanceType:
    name: str
    vcpus: int
    memory_gib: float
    gpu: bool
    network_gbit: str
    price_per_hour: dict[str, float]  # zone kind -> $/h

    def price(self, zone_kind: str) -> float:
        try:
            return self.price_per_hour[zone_kind]
        except KeyError:
            raise CostError(
                f"instance {self.name!r} has no price for zone kind {zone_kind!r}"
            ) from None


# Wavelength prices and specs from the carrier-edge catalog; availability
# prices are the matching us-west on-demand rates.
INSTANCE_CATALOG: dict[str, InstanceType] = {
    t.name: t
    for t in (
        InstanceType("t3.medium", 2, 4, False, "upto 5",
                     {"wavelength": 0.056, "availability": 0.0416}),
        InstanceType("t3.xlarge", 4, 16, False, "upto 5",
                     {"wavelength": 0.224, "availability": 0.167}),
        InstanceType("r5.2xlarge", 8, 64, False, "upto 10",
                     {"wavelength": 0.68, "availability": 0.504}),
        InstanceType("g4dn.2xlarge", 8, 32, True, "upto 25",
                     {"wavelength": 1.317, "availability": 0.752}),
    )
}

# Per-instance-month storage, back-solved from the deployment table rows
# (50 AZ -> $975; the WL and hybrid rows pin wavelength at 29.10).
STORAGE_MONTH: dict[str, float] = {"availability": 19.50, "wavelength": 29.10}


@dataclass(frozen=True)
class SizingRules:
    """How many cameras one VM carries, per role.

    A processing VM handles 2 camera pipelines. A relay VM forwards as
    many camera streams as fit through the inter-zone uplink, i.e.
    floor(link / per-camera bitrate) = 7 with the defaults.
    """

    cameras_per_processing_vm: int = 2
    relay_link_mbps: float = 35.0
    camera_mbps: float = 5.0

    @property
    def cameras_per_relay_vm(self) -> int:
        return int(self.relay_link_mbps // self.camera_mbps)


def instances_required(cameras: int, role: str, sizing: SizingRules = SizingRules()) -> int:
    if cameras < 0:
        raise CostError("camera count must be >= 0")
    if role == "processing":
        per_vm = sizing.cameras_per_processing_vm
    elif role == "relay":
        per_vm = sizing.cameras_per_relay_vm
    else:
        raise CostError(f"unknown role {role!r}")
    return math.ceil(cameras / per_vm)


@dataclass(frozen=True)
class PlanRow:
    instance_type: str
    zone_kind: str  # "wavelength" | "availability"
    count: int | None = None
    role: str | None = None  # "processing" | "relay" sizes the row from cameras

    def resolved_count(self, cameras: int, sizing: SizingRules) -> int:
        if self.count is not None:
            return self.count
        if self.role is None:
            raise CostError("plan row needs either count or role")
        return instances_required(cameras, self.role, sizing)


@dataclass(frozen=True)
class DeploymentPlan:
    name: str
    cameras: int
    rows: tuple[PlanRow, ...]


@dataclass(frozen=True)
class MonthlyCost:
    plan: str
    hourly: float
    compute: float
    storage: float
    total: float


@dataclass(frozen=True)
class DeploymentSection:
    plans: tuple[DeploymentPlan, ...]
    sizing: SizingRules = SizingRules()
    storage_month: dict[str, float] = field(default_factory=lambda: dict(STORAGE_MONTH))
    catalog: dict[str, InstanceType] = field(default_factory=lambda: dict(INSTANCE_CATALOG))

    def plan(self, name: str) -> DeploymentPlan:
        for p in self.plans:
            if p.name == name:
                return p
        raise CostError(f"unknown plan {name!r}")


def monthly_cost(
    plan: DeploymentPlan,
    catalog: dict[str, InstanceType] | None = None,
    storage_month: dict[str, float] | None = None,
    sizing: SizingRules = SizingRules(),
) -> MonthlyCost:
    catalog = catalog if catalog is not None else INSTANCE_CATALOG
    storage_month = storage_month if storage_month is not None else STORAGE_MONTH
    hourly = 0.0
    storage = 0.0
    for row in plan.rows:
        if row.instance_type not in catalog:
            raise CostError(f"unknown instance type {row.instance_type!r}")
        itype = catalog[row.instance_type]
        count = row.resolved_count(plan.cameras, sizing)
        if count < 0:
            raise CostError("instance counts must be >= 0")
        hourly += count * itype.price(row.zone_kind)
        if row.zone_kind not in storage_month:
            raise CostError(f"no storage rate for zone kind {row.zone_kind!r}")
        storage += count * storage_month[row.zone_kind]
    compute = hourly * HOURS_PER_MONTH
    return MonthlyCost(
        plan=plan.name, hourly=hourly, compute=compute, storage=storage,
        total=compute + storage,
    )


def compare_plans(a: MonthlyCost, b: MonthlyCost) -> float:
    """Fraction of b's total saved by choosing a instead."""
    if b.total <= 0:
        raise CostError("reference plan must have a positive total")
    return (b.total - a.total) / b.total
