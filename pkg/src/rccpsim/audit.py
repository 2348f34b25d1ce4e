"""Invariant checks run after every event in test mode.

Each check recomputes its expectation by brute force from simulator state or
from the decision data recorded in protocol traces.
"""

from __future__ import annotations

from collections import Counter

from .domain import CloudletStatus

__all__ = ["InvariantViolation", "Auditor"]


class InvariantViolation(AssertionError):
    pass


class Auditor:
    """Observer for :class:`rccpsim.engine.Simulation`; raises on the first violation."""

    def __init__(self, check_selection: bool = True):
        self.check_selection = check_selection
        self.events = 0
        self.last_time = 0.0
        self.checked_traces = 0
        self.finishes_seen: set[int] = set()
        self.decisions_checked = 0

    def __call__(self, sim, ev):
        self.events += 1
        if ev.time < self.last_time:
            raise InvariantViolation(f"clock went backward at {ev}")
        self.last_time = ev.time
        if ev.kind == "CloudletFinish":
            cid = ev.payload[1]
            if cid not in sim.arrived:
                raise InvariantViolation(f"cloudlet {cid} finished before arriving")
        self._ral(sim)
        self._cloudlets(sim)
        if self.check_selection:
            self._decisions(sim)

    def _ral(self, sim):
        prov = sim.provisioner
        for oid, owner in prov.owners.items():
            leased = [rid for rid, e in prov.ral.items() if e.resource.owner_id == oid]
            if len(owner.held) + len(leased) != len(owner.catalog):
                raise InvariantViolation(f"RAL conservation broken for owner {oid}")
            if owner.held & set(leased):
                raise InvariantViolation(f"owner {oid} holds a leased resource")
        holders = Counter(e.allocated_to for e in prov.ral.values() if e.allocated_to is not None)
        if holders and max(holders.values()) > 1:
            raise InvariantViolation("a VM holds more than one resource")
        for vm_id, vm in sim.vmm.vms.items():
            e = prov.ral.get(vm.resource_id)
            if e is None or e.allocated_to != vm_id:
                raise InvariantViolation(f"{vm_id} backed by a resource not allocated to it")
        if sum(holders.values()) != len(sim.vmm.vms):
            raise InvariantViolation("allocated RAL entries do not match live VMs")

    def _cloudlets(self, sim):
        places = list(sim.vmm.backlog)
        for vm in sim.vmm.vms.values():
            places.extend(vm.queue)
            if vm.running is not None:
                places.append(vm.running)
        if len(places) != len(set(places)):
            raise InvariantViolation("a cloudlet sits in two queues")
        completed = sum(1 for c in sim.workload if c.status is CloudletStatus.COMPLETED)
        if len(sim.arrived) != completed + len(places):
            raise InvariantViolation(
                f"cloudlet conservation: arrived {len(sim.arrived)} != "
                f"completed {completed} + in flight {len(places)}")
        for cid in places:
            c = sim.cloudlets[cid]
            if c.status is CloudletStatus.COMPLETED or cid not in sim.arrived:
                raise InvariantViolation(f"cloudlet {cid} queued in state {c.status}")
        if sim.vmm.backlog and sim.vmm.vms:
            raise InvariantViolation("backlog left behind while VMs exist")

    def _decisions(self, sim):
        traces = sim.provisioner.traces
        policy = sim.policy_name
        while self.checked_traces < len(traces):
            tr = traces[self.checked_traces]
            self.checked_traces += 1
            if tr.kind != "allocation":
                continue
            by_tag = {m.step_tag.value: m for m in tr.messages}
            granted = by_tag["GrantToVmm"].payload[1]
            if "OfferSelected" in by_tag and policy in ("era", "min-cost"):
                sel = by_tag["OfferSelected"]
                best = None
                for rid, cf in zip(sel.values["offers"], sel.values["cf"]):
                    if best is None or cf < best[1] or (cf == best[1] and rid < best[0]):
                        best = (rid, cf)
                if sel.payload[0] != best[0]:
                    raise InvariantViolation(f"trace {tr.trace_id}: offer {sel.payload[0]} is not min-CF")
                self.decisions_checked += 1
            if "RalHit" in by_tag and policy == "era":
                hit = by_tag["RalHit"]
                best = None
                for rid, pf, pv in zip(hit.payload, hit.values["pf"], hit.values["pv"]):
                    if best is None or (pf, pv) > best[1:] or ((pf, pv) == best[1:] and rid < best[0]):
                        best = (rid, pf, pv)
                if granted != best[0]:
                    raise InvariantViolation(f"trace {tr.trace_id}: grant {granted} is not max-PF")
                self.decisions_checked += 1
