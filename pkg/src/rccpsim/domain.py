"""Shared domain types: resources, owners' links, cloudlets and VMs."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields

__all__ = [
    "ResourceSpec",
    "OwnedResource",
    "NetworkLink",
    "CloudletStatus",
    "Cloudlet",
    "VmInstance",
    "spec_satisfies",
    "check_unique",
]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _finite(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


@dataclass(frozen=True)
class ResourceSpec:
    """Capacity vector of a provisionable resource (or of a request)."""

    pe_count: int
    mips_per_pe: float
    ram_mb: float
    storage_mb: float = 0.0
    bandwidth_mbps: float = 1.0

    def __post_init__(self):
        _require(isinstance(self.pe_count, int) and self.pe_count >= 1,
                 f"pe_count must be an integer >= 1, got {self.pe_count!r}")
        _require(_finite(self.mips_per_pe) and self.mips_per_pe > 0,
                 f"mips_per_pe must be > 0, got {self.mips_per_pe!r}")
        _require(_finite(self.ram_mb) and self.ram_mb > 0,
                 f"ram_mb must be > 0, got {self.ram_mb!r}")
        _require(_finite(self.storage_mb) and self.storage_mb >= 0,
                 f"storage_mb must be >= 0, got {self.storage_mb!r}")
        _require(_finite(self.bandwidth_mbps) and self.bandwidth_mbps > 0,
                 f"bandwidth_mbps must be > 0, got {self.bandwidth_mbps!r}")

    @property
    def total_mips(self) -> float:
        return self.pe_count * self.mips_per_pe


def spec_satisfies(candidate: ResourceSpec, request: ResourceSpec) -> bool:
    """True iff every field of ``candidate`` is >= the matching field of ``request``."""
    return all(getattr(candidate, f.name) >= getattr(request, f.name)
               for f in fields(ResourceSpec))


@dataclass(frozen=True)
class OwnedResource:
    resource_id: str
    owner_id: str
    spec: ResourceSpec
    resource_cost: float

    def __post_init__(self):
        _require(bool(self.resource_id), "resource_id must be non-empty")
        _require(bool(self.owner_id), "owner_id must be non-empty")
        _require(_finite(self.resource_cost) and self.resource_cost >= 0,
                 f"resource_cost must be >= 0, got {self.resource_cost!r}")


@dataclass(frozen=True)
class NetworkLink:
    """Owner-to-provisioner path; the three link cost factors."""

    owner_id: str
    hops_count: int
    bandwidth_mbps: float
    delay_ms: float = 0.0

    def __post_init__(self):
        _require(isinstance(self.hops_count, int) and self.hops_count >= 1,
                 f"hops_count must be an integer >= 1, got {self.hops_count!r}")
        _require(_finite(self.bandwidth_mbps) and self.bandwidth_mbps > 0,
                 f"bandwidth_mbps must be > 0, got {self.bandwidth_mbps!r}")
        _require(_finite(self.delay_ms) and self.delay_ms >= 0,
                 f"delay_ms must be >= 0, got {self.delay_ms!r}")

    @property
    def delay_s(self) -> float:
        return self.delay_ms / 1000.0


class CloudletStatus(enum.Enum):
    PENDING = "Pending"
    RUNNING = "Running"
    COMPLETED = "Completed"


_NEXT_STATUS = {
    CloudletStatus.PENDING: CloudletStatus.RUNNING,
    CloudletStatus.RUNNING: CloudletStatus.COMPLETED,
}


@dataclass
class Cloudlet:
    """Unit of work. Only ``status`` (and run bookkeeping) changes after creation.

    A redirected Running cloudlet restarts from zero progress; ``restart``
    moves it back to Pending, the one exception to forward-only status.
    """

    cloudlet_id: int
    length_mi: float
    payload_mb: float
    arrival_time: float
    status: CloudletStatus = CloudletStatus.PENDING
    finish_time: float | None = None

    def __post_init__(self):
        _require(_finite(self.length_mi) and self.length_mi > 0,
                 f"length_mi must be > 0, got {self.length_mi!r}")
        _require(_finite(self.payload_mb) and self.payload_mb >= 0,
                 f"payload_mb must be >= 0, got {self.payload_mb!r}")
        _require(_finite(self.arrival_time) and self.arrival_time >= 0,
                 f"arrival_time must be >= 0, got {self.arrival_time!r}")

    def advance(self, to: CloudletStatus) -> None:
        if _NEXT_STATUS.get(self.status) is not to:
            raise ValueError(f"cloudlet {self.cloudlet_id}: illegal transition "
                             f"{self.status.value} -> {to.value}")
        self.status = to

    def restart(self) -> None:
        if self.status is not CloudletStatus.RUNNING:
            raise ValueError(f"cloudlet {self.cloudlet_id} is not running")
        self.status = CloudletStatus.PENDING


@dataclass
class VmInstance:
    vm_id: str
    resource_id: str
    spec: ResourceSpec
    pf_at_allocation: float
    created_at: float
    ready_at: float = 0.0
    queue: list[int] = field(default_factory=list)
    # cloudlet currently executing (not in queue) and when it started
    running: int | None = None
    run_started: float = 0.0
    run_token: int = 0


def check_unique(ids, what: str) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise ValueError(f"duplicate {what}: {i!r}")
        seen.add(i)
