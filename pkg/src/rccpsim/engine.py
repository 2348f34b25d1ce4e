"""Deterministic discrete-event loop tying workload, VMM and provisioner together."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace

from .domain import CloudletStatus
from .metrics import MetricsRecord
from .policies import make_policy
from .provisioner import NoResourceAvailable, Provisioner
from .rng import stream
from .vm_manager import VmManager
from .workload import generate_workload

__all__ = ["Event", "EVENT_KINDS", "Simulation", "run", "run_id_for", "workload_seed"]

EVENT_KINDS = ("CloudletArrival", "CloudletFinish", "RebalanceTick", "SimulationEnd")


@dataclass(frozen=True, order=True)
class Event:
    time: float
    sequence: int
    kind: str
    payload: tuple = ()


def run_id_for(policy: str, seed: int) -> str:
    return f"{policy}-{seed:020d}"


def workload_seed(base: int, run_seed: int) -> int:
    """Mix the scenario's workload seed with the run seed."""
    return int(stream(run_seed, "workload-seed", base & 0xFFFFFFFF, base >> 32)
               .integers(0, 2**63))


class Simulation:
    """One run of one policy over one scenario.

    ``observer(sim, event)`` is called after every processed event; the
    audit module uses it to check invariants.
    """

    def __init__(self, scenario, policy: str = "era", seed: int = 0, observer=None):
        self.scenario = scenario
        self.policy_name = policy
        self.seed = seed
        self.observer = observer
        self.policy = make_policy(policy, seed)
        self.provisioner = Provisioner(scenario.build_owners(), scenario.cost_weights,
                                       scenario.scoring, policy=self.policy)
        params = replace(scenario.workload, seed=workload_seed(scenario.workload.seed, seed))
        self.workload = generate_workload(params)
        self.cloudlets = {c.cloudlet_id: c for c in self.workload}
        self.vmm = VmManager(self.provisioner, scenario.vmm.vm_request_spec,
                             scenario.vmm.high_watermark, scenario.vmm.low_watermark,
                             cloudlets=self.cloudlets, schedule=self.schedule)
        self.now = 0.0
        self.arrived: set[int] = set()
        self.completed = 0
        self.finished = False
        self._queue: list[Event] = []
        self._seq = 0

    def schedule(self, time: float, kind: str, payload=()) -> Event:
        if time < self.now:
            raise ValueError(f"cannot schedule {kind} in the past ({time} < {self.now})")
        ev = Event(time, self._seq, kind, tuple(payload))
        self._seq += 1
        heapq.heappush(self._queue, ev)
        return ev

    # -- handlers -------------------------------------------------------------

    def _arrival(self, ev: Event):
        cid = ev.payload[0]
        self.arrived.add(cid)
        self.vmm.submit(cid, self.now)
        self.schedule(self.now, "RebalanceTick", (cid,))

    def _finish(self, ev: Event):
        vm_id, cid, token = ev.payload
        if self.vmm.on_finish(vm_id, cid, token, self.now):
            self.completed += 1
            self.schedule(self.now, "RebalanceTick", ())
            if self.completed == len(self.workload):
                self.schedule(self.now, "SimulationEnd", ())

    def _tick(self, ev: Event):
        payload = self.cloudlets[ev.payload[0]].payload_mb if ev.payload else 0.0
        self.vmm.scale(self.now, payload)

    def _end(self, ev: Event):
        if self.finished:
            return
        for vm_id in sorted(self.vmm.vms):
            self.vmm.complete_vm(vm_id, self.now)
        # leases go back to owners only once the run is over
        for rid in sorted(self.provisioner.ral):
            self.provisioner.return_to_owner(rid)
        self.finished = True

    _HANDLERS = {"CloudletArrival": _arrival, "CloudletFinish": _finish,
                 "RebalanceTick": _tick, "SimulationEnd": _end}

    # -- loop -----------------------------------------------------------------

    def run(self) -> MetricsRecord:
        for _ in range(self.scenario.vmm.initial_vms):
            try:
                self.vmm.create_vm(0.0)
            except NoResourceAvailable:
                break
        for c in self.workload:
            self.schedule(c.arrival_time, "CloudletArrival", (c.cloudlet_id,))
        if not self.workload:
            self.schedule(0.0, "SimulationEnd", ())
        while self._queue:
            ev = heapq.heappop(self._queue)
            self.now = ev.time
            self._HANDLERS[ev.kind](self, ev)
            if self.observer is not None:
                self.observer(self, ev)
            if self.finished:
                break
        if not self.finished:
            # queue drained with work stranded (no feasible resource); close out anyway
            self.finished = True
        return self.metrics()

    def metrics(self) -> MetricsRecord:
        done = [c for c in self.workload if c.status is CloudletStatus.COMPLETED]
        n = len(self.workload)
        total = self.provisioner.total_cost
        if done:
            makespan = max(c.finish_time for c in done) - min(c.arrival_time for c in self.workload)
            turnaround = sum(c.finish_time - c.arrival_time for c in done) / len(done)
        else:
            makespan = turnaround = 0.0
        pfs = self.vmm.grant_pfs
        return MetricsRecord(
            run_id=run_id_for(self.policy_name, self.seed),
            policy=self.policy_name,
            seed=self.seed,
            total_cost=float(total),
            mean_cost_per_cloudlet=float(total / n) if n else 0.0,
            makespan_s=float(makespan),
            mean_cloudlet_turnaround_s=float(turnaround),
            vm_creations=self.vmm.vm_creations,
            vm_deletions=self.vmm.vm_deletions,
            acquisitions=len(self.provisioner.charges),
            cloudlets_completed=len(done),
            mean_pf_of_grants=float(sum(pfs) / len(pfs)) if pfs else 0.0,
        )


def run(scenario, policy: str = "era", seed: int = 0, observer=None) -> MetricsRecord:
    return Simulation(scenario, policy, seed, observer).run()
