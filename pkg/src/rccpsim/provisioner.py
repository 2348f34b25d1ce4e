"""The resource provisioner: RAL bookkeeping, owner negotiation, PF-based grants.

Every VM request produces a :class:`ProtocolTrace`. A request served from
the RAL yields ``VmRequest, RalHit, GrantToVmm``; otherwise the provisioner
queries every owner, picks the minimum cost-factor offer, leases it into
the RAL and then grants it::

    VmRequest, RalMiss, AvailabilityQuery*, AvailabilityAck*, OfferSelected,
    AcquireRequest, AccessGranted, RalUpdated, GrantToVmm

Returning a VM's resource yields ``ReleaseToProvisioner, RalReleased``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .cost_model import CostWeights, cost_factor, link_communication_cost
from .domain import NetworkLink, OwnedResource, ResourceSpec, check_unique, spec_satisfies
from .scoring import (
    ExecTimeEstimate,
    ReliabilityStats,
    ScoringParams,
    initial_estimate,
    performance_factor,
    popularity_value,
    rank_candidates,
    record_execution_time,
    record_outcome,
    reliability,
)

__all__ = [
    "StepTag", "Actor", "ProtocolMessage", "ProtocolTrace", "RALEntry",
    "OwnerOffer", "ResourceOwner", "NoResourceAvailable", "Provisioner",
    "select_offer", "dump_traces", "MIN_COST",
]

# floor for the cost term of PF; a free resource over a free link would divide by zero
MIN_COST = 1e-9


class StepTag(str, enum.Enum):
    VmRequest = "VmRequest"
    RalHit = "RalHit"
    RalMiss = "RalMiss"
    AvailabilityQuery = "AvailabilityQuery"
    AvailabilityAck = "AvailabilityAck"
    OfferSelected = "OfferSelected"
    AcquireRequest = "AcquireRequest"
    AccessGranted = "AccessGranted"
    RalUpdated = "RalUpdated"
    GrantToVmm = "GrantToVmm"
    ReleaseToProvisioner = "ReleaseToProvisioner"
    RalReleased = "RalReleased"


class Actor(str, enum.Enum):
    VMM = "VMM"
    Provisioner = "Provisioner"
    Owner = "Owner"


class NoResourceAvailable(Exception):
    """Neither the RAL nor any owner can satisfy a request."""


@dataclass(frozen=True)
class ProtocolMessage:
    step_tag: StepTag
    actor: Actor
    payload: tuple
    time: float
    values: dict = field(default_factory=dict, compare=False)


@dataclass
class ProtocolTrace:
    trace_id: int
    kind: str  # "allocation" or "release"
    messages: list[ProtocolMessage] = field(default_factory=list)

    def add(self, tag: StepTag, actor: Actor, payload, time: float, **values):
        if self.messages and time < self.messages[-1].time:
            raise ValueError(f"trace {self.trace_id}: time went backward at {tag.value}")
        self.messages.append(ProtocolMessage(tag, actor, tuple(payload), time, values))

    @property
    def tags(self) -> list[str]:
        return [m.step_tag.value for m in self.messages]

    @property
    def end_time(self) -> float:
        return self.messages[-1].time if self.messages else 0.0


def dump_traces(traces) -> str:
    """Line-delimited JSON, one message per line."""
    lines = []
    for tr in traces:
        for m in tr.messages:
            rec = {"trace": tr.trace_id, "time": round(m.time, 9), "step": m.step_tag.value,
                   "actor": m.actor.value, "ids": list(m.payload)}
            if m.values:
                rec["values"] = m.values
            lines.append(json.dumps(rec, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class RALEntry:
    resource: OwnedResource
    cached_lcc: float
    stats: ReliabilityStats
    et: ExecTimeEstimate
    allocated_to: str | None = None

    @property
    def resource_id(self) -> str:
        return self.resource.resource_id

    @property
    def available(self) -> bool:
        return self.allocated_to is None

    @property
    def state(self) -> str:
        return "Available" if self.allocated_to is None else f"Allocated({self.allocated_to})"

    @property
    def utilization_cost(self) -> float:
        return self.resource.resource_cost + self.cached_lcc


@dataclass(frozen=True)
class OwnerOffer:
    resource: OwnedResource
    link: NetworkLink
    cf: float
    l_cc: float = 0.0

    @property
    def resource_id(self) -> str:
        return self.resource.resource_id


class ResourceOwner:
    """Holds a catalog of resources; leases them out one at a time."""

    def __init__(self, owner_id: str, resources, link: NetworkLink):
        if link.owner_id != owner_id:
            raise ValueError(f"link belongs to {link.owner_id!r}, not {owner_id!r}")
        self.owner_id = owner_id
        self.link = link
        self.catalog = {r.resource_id: r for r in resources}
        self.held = set(self.catalog)

    def availability(self, request: ResourceSpec) -> list[OwnedResource]:
        return [self.catalog[rid] for rid in sorted(self.held)
                if spec_satisfies(self.catalog[rid].spec, request)]

    def grant(self, resource_id: str) -> OwnedResource:
        if resource_id not in self.held:
            raise ValueError(f"owner {self.owner_id} does not hold {resource_id!r}")
        self.held.remove(resource_id)
        return self.catalog[resource_id]

    def take_back(self, resource_id: str) -> None:
        if resource_id not in self.catalog or resource_id in self.held:
            raise ValueError(f"owner {self.owner_id} cannot take back {resource_id!r}")
        self.held.add(resource_id)


def select_offer(offers) -> OwnerOffer:
    """Minimum cost factor; ties by ascending resource id."""
    if not offers:
        raise ValueError("no offers to select from")
    return min(offers, key=lambda o: (o.cf, o.resource_id))


class Provisioner:
    """Single logical actor owning the RAL.

    ``policy`` (see :mod:`rccpsim.policies`) decides which RAL entry is
    granted and which owner offer is leased; ``None`` means ERA.
    """

    def __init__(self, owners, weights: CostWeights = CostWeights(),
                 params: ScoringParams = ScoringParams(), policy=None):
        owners = list(owners)
        check_unique([o.owner_id for o in owners], "owner_id")
        check_unique([rid for o in owners for rid in o.catalog], "resource_id")
        self.owners = {o.owner_id: o for o in sorted(owners, key=lambda o: o.owner_id)}
        self.weights = weights
        self.params = params
        self.policy = policy
        self.ral: dict[str, RALEntry] = {}
        self.traces: list[ProtocolTrace] = []
        self.charges: list[tuple[str, float]] = []
        self.rejected = 0
        self._next_trace = 0
        # E_T and reliability history survive a resource's return to its owner
        self._history: dict[str, tuple[ReliabilityStats, ExecTimeEstimate]] = {}

    # -- scores -----------------------------------------------------------

    def pf(self, entry: RALEntry) -> float:
        c = max(entry.utilization_cost, MIN_COST)
        return performance_factor(self.params, reliability(entry.stats), c, entry.et.et_seconds)

    def pv(self, entry: RALEntry) -> float:
        return popularity_value(entry.et.et_seconds)

    @property
    def total_cost(self) -> float:
        return sum(cf for _, cf in self.charges)

    def _new_trace(self, kind: str) -> ProtocolTrace:
        tr = ProtocolTrace(self._next_trace, kind)
        self._next_trace += 1
        return tr

    # -- protocol steps ---------------------------------------------------

    def check_ral(self, request: ResourceSpec) -> list[RALEntry]:
        return [e for rid, e in sorted(self.ral.items())
                if e.available and spec_satisfies(e.resource.spec, request)]

    def query_owners(self, request: ResourceSpec, payload_mb: float = 0.0) -> list[OwnerOffer]:
        offers = []
        for owner in self.owners.values():
            l_cc = link_communication_cost(owner.link, payload_mb, self.weights)
            for res in owner.availability(request):
                if res.resource_id in self.ral:
                    continue
                offers.append(OwnerOffer(res, owner.link, cost_factor(res.resource_cost, l_cc), l_cc))
        return offers

    def acquire_resource(self, offer: OwnerOffer, trace: ProtocolTrace | None = None,
                         now: float = 0.0) -> RALEntry:
        rid = offer.resource_id
        if rid in self.ral:
            raise ValueError(f"resource {rid!r} is already in the RAL")
        owner = self.owners[offer.resource.owner_id]
        if trace is not None:
            trace.add(StepTag.AcquireRequest, Actor.Provisioner, (rid, owner.owner_id), now)
        res = owner.grant(rid)
        granted_at = now + 2 * owner.link.delay_s
        stats, et = self._history.get(rid, (ReliabilityStats(),
                                            initial_estimate(res.spec.total_mips, self.params)))
        entry = RALEntry(res, offer.l_cc, stats, et)
        self.ral[rid] = entry
        self.charges.append((rid, offer.cf))
        if trace is not None:
            trace.add(StepTag.AccessGranted, Actor.Owner, (rid,), granted_at)
            trace.add(StepTag.RalUpdated, Actor.Provisioner, (rid,), granted_at)
        return entry

    def allocate_to_vmm(self, candidates, vm_id: str, trace: ProtocolTrace | None = None,
                        now: float = 0.0) -> str:
        if not candidates:
            raise ValueError("no candidates to allocate")
        if self.policy is None:
            chosen = self.era_choice(candidates)
        else:
            chosen = self.policy.choose_entry(self, candidates)
        if not chosen.available:
            raise ValueError(f"resource {chosen.resource_id!r} is not available")
        chosen.allocated_to = vm_id
        if trace is not None:
            trace.add(StepTag.GrantToVmm, Actor.Provisioner, (vm_id, chosen.resource_id), now,
                      pf=self.pf(chosen))
        return chosen.resource_id

    def era_choice(self, candidates) -> RALEntry:
        by_id = {e.resource_id: e for e in candidates}
        best = rank_candidates([(e.resource_id, self.pf(e), self.pv(e)) for e in candidates])[0]
        return by_id[best[0]]

    def handle_vm_request(self, request: ResourceSpec, payload_mb: float, vm_id: str,
                          now: float = 0.0) -> tuple[str, ProtocolTrace]:
        """Serve one VM request end to end; raises NoResourceAvailable."""
        trace = self._new_trace("allocation")
        trace.add(StepTag.VmRequest, Actor.VMM, (vm_id,), now)
        candidates = self.check_ral(request)
        if candidates:
            trace.add(StepTag.RalHit, Actor.Provisioner, [e.resource_id for e in candidates], now,
                      pf=[self.pf(e) for e in candidates], pv=[self.pv(e) for e in candidates])
            rid = self.allocate_to_vmm(candidates, vm_id, trace, now)
            self.traces.append(trace)
            return rid, trace

        trace.add(StepTag.RalMiss, Actor.Provisioner, (), now)
        for oid in self.owners:
            trace.add(StepTag.AvailabilityQuery, Actor.Provisioner, (oid,), now)
        offers = self.query_owners(request, payload_mb)
        acks = sorted(((now + 2 * o.link.delay_s, oid) for oid, o in self.owners.items()))
        for t, oid in acks:
            offered = [o.resource_id for o in offers if o.resource.owner_id == oid]
            trace.add(StepTag.AvailabilityAck, Actor.Owner, [oid] + offered, t)
        if not offers:
            self.rejected += 1
            self._next_trace -= 1
            raise NoResourceAvailable(f"no resource satisfies the request for {vm_id}")
        t_sel = acks[-1][0]
        offer = select_offer(offers) if self.policy is None else self.policy.choose_offer(self, offers)
        trace.add(StepTag.OfferSelected, Actor.Provisioner,
                  (offer.resource_id, offer.resource.owner_id), t_sel,
                  offers=[o.resource_id for o in offers], cf=[o.cf for o in offers])
        entry = self.acquire_resource(offer, trace, t_sel)
        rid = self.allocate_to_vmm([entry], vm_id, trace, trace.end_time)
        self.traces.append(trace)
        return rid, trace

    def release_resource(self, resource_id: str, success: bool, now: float = 0.0) -> RALEntry:
        entry = self.ral.get(resource_id)
        if entry is None:
            raise KeyError(f"unknown resource {resource_id!r}")
        if entry.available:
            raise ValueError(f"resource {resource_id!r} is not allocated")
        trace = self._new_trace("release")
        trace.add(StepTag.ReleaseToProvisioner, Actor.VMM, (entry.allocated_to, resource_id), now)
        entry.allocated_to = None
        entry.stats = record_outcome(entry.stats, success)
        trace.add(StepTag.RalReleased, Actor.Provisioner, (resource_id,), now)
        self.traces.append(trace)
        return entry

    def record_execution(self, resource_id: str, seconds: float) -> None:
        entry = self.ral[resource_id]
        entry.et = record_execution_time(entry.et, seconds, self.params)

    def return_to_owner(self, resource_id: str) -> None:
        """Hand an idle leased resource back; its history is remembered."""
        entry = self.ral[resource_id]
        if not entry.available:
            raise ValueError(f"resource {resource_id!r} is still allocated")
        del self.ral[resource_id]
        self._history[resource_id] = (entry.stats, entry.et)
        self.owners[entry.resource.owner_id].take_back(resource_id)

    def ral_conserved(self) -> bool:
        for oid, owner in self.owners.items():
            leased = sum(1 for e in self.ral.values() if e.resource.owner_id == oid)
            if len(owner.held) + leased != len(owner.catalog):
                return False
            if owner.held & {rid for rid, e in self.ral.items() if e.resource.owner_id == oid}:
                return False
        return True
