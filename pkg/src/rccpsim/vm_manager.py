"""The VMM: VM pool, load-driven scaling, victim eviction and cloudlet dispatch."""

from __future__ import annotations

import enum
import math

from .domain import Cloudlet, CloudletStatus, ResourceSpec, VmInstance
from .provisioner import NoResourceAvailable, Provisioner

__all__ = ["Action", "VmManager", "cloudlet_runtime", "INFINITE_LOAD"]

INFINITE_LOAD = math.inf


class Action(enum.Enum):
    SCALE_UP = "ScaleUp"
    SCALE_DOWN = "ScaleDown"
    HOLD = "Hold"


def cloudlet_runtime(cloudlet: Cloudlet, spec: ResourceSpec) -> float:
    """Seconds to run ``cloudlet`` alone on ``spec`` (space-shared, all PEs)."""
    return cloudlet.length_mi / (spec.pe_count * spec.mips_per_pe)


class VmManager:
    """Owns the VM pool; all resource traffic goes through ``provisioner``.

    ``schedule(time, kind, payload)`` is the event-loop hook used to post
    cloudlet completions.
    """

    def __init__(self, provisioner: Provisioner, request_spec: ResourceSpec,
                 high_watermark: float = 4, low_watermark: float = 1,
                 cloudlets: dict | None = None, schedule=None):
        if not 0 <= low_watermark < high_watermark:
            raise ValueError(f"need 0 <= low_watermark < high_watermark, "
                             f"got ({low_watermark}, {high_watermark})")
        self.provisioner = provisioner
        self.request_spec = request_spec
        self.high_watermark = high_watermark
        self.low_watermark = low_watermark
        self.cloudlets: dict[int, Cloudlet] = {} if cloudlets is None else cloudlets
        self.schedule = schedule or (lambda time, kind, payload: None)
        self.vms: dict[str, VmInstance] = {}
        self.backlog: list[int] = []
        self.vm_creations = 0
        self.vm_deletions = 0
        self.grant_pfs: list[float] = []
        self.ended: list[tuple[str, bool]] = []
        self._next_vm = 0

    # -- load ---------------------------------------------------------------

    def outstanding(self) -> int:
        n = len(self.backlog)
        for vm in self.vms.values():
            n += len(vm.queue) + (vm.running is not None)
        return n

    def vm_load(self) -> float:
        if not self.vms:
            return INFINITE_LOAD
        return self.outstanding() / len(self.vms)

    def rebalance(self) -> Action:
        load = self.vm_load()
        if load > self.high_watermark:
            return Action.SCALE_UP
        if load < self.low_watermark and len(self.vms) >= 2:
            return Action.SCALE_DOWN
        return Action.HOLD

    # -- creation ----------------------------------------------------------

    def create_vm(self, now: float, payload_mb: float = 0.0) -> VmInstance:
        vm_id = f"vm-{self._next_vm:06d}"
        prov = self.provisioner
        rid, trace = prov.handle_vm_request(self.request_spec, payload_mb, vm_id, now)
        self._next_vm += 1
        entry = prov.ral[rid]
        pf = prov.pf(entry)
        vm = VmInstance(vm_id, rid, entry.resource.spec, pf, now, ready_at=trace.end_time)
        self.vms[vm_id] = vm
        self.vm_creations += 1
        self.grant_pfs.append(pf)
        if self.backlog:
            pending, self.backlog = self.backlog, []
            for cid in pending:
                self.submit(cid, now)
        else:
            self._steal_for(vm)
        self._start_next(vm, now)
        return vm

    def _steal_for(self, vm: VmInstance) -> None:
        # move queued (not running) cloudlets from the longest queues to a fresh VM
        others = sorted((v for v in self.vms.values() if v is not vm), key=lambda v: v.vm_id)
        while others:
            donor = max(others, key=lambda v: len(v.queue))  # first max = lowest id
            if len(donor.queue) <= len(vm.queue) + 1:
                break
            vm.queue.append(donor.queue.pop())

    # -- dispatch -------------------------------------------------------------

    def _busy_until(self, vm: VmInstance, now: float) -> float:
        t = max(now, vm.ready_at)
        if vm.running is not None:
            t = max(t, vm.run_started + cloudlet_runtime(self.cloudlets[vm.running], vm.spec))
        return t + sum(self.cloudlets[c].length_mi for c in vm.queue) / vm.spec.total_mips

    def submit(self, cloudlet_id: int, now: float) -> str | None:
        """Queue a cloudlet on the VM expected to finish it first."""
        if not self.vms:
            self.backlog.append(cloudlet_id)
            return None
        c = self.cloudlets[cloudlet_id]
        vm = min(self.vms.values(),
                 key=lambda v: (self._busy_until(v, now) + cloudlet_runtime(c, v.spec), v.vm_id))
        vm.queue.append(cloudlet_id)
        self._start_next(vm, now)
        return vm.vm_id

    def _start_next(self, vm: VmInstance, now: float) -> None:
        if vm.running is not None or not vm.queue:
            return
        cid = vm.queue.pop(0)
        c = self.cloudlets[cid]
        c.advance(CloudletStatus.RUNNING)
        vm.running = cid
        vm.run_started = max(now, vm.ready_at)
        vm.run_token += 1
        self.schedule(vm.run_started + cloudlet_runtime(c, vm.spec), "CloudletFinish",
                      (vm.vm_id, cid, vm.run_token))

    def on_finish(self, vm_id: str, cloudlet_id: int, token: int, now: float) -> bool:
        """Handle a completion event; returns False if it was superseded."""
        vm = self.vms.get(vm_id)
        if vm is None or vm.running != cloudlet_id or vm.run_token != token:
            return False
        c = self.cloudlets[cloudlet_id]
        c.advance(CloudletStatus.COMPLETED)
        c.finish_time = now
        self.provisioner.record_execution(vm.resource_id, now - vm.run_started)
        vm.running = None
        self._start_next(vm, now)
        return True

    # -- deletion ----------------------------------------------------------

    def vm_scores(self, vm_id: str) -> tuple[float, float]:
        """Current (PF, E_T) of the resource backing ``vm_id``."""
        entry = self.provisioner.ral[self.vms[vm_id].resource_id]
        return self.provisioner.pf(entry), entry.et.et_seconds

    def select_victim(self) -> str:
        """Least PF first; among equal PF the higher E_T; then lowest vm id."""
        if len(self.vms) < 2:
            raise ValueError("victim selection needs at least two VMs")

        def key(vm_id):
            pf, et = self.vm_scores(vm_id)
            return (pf, -et, vm_id)
        return min(self.vms, key=key)

    def redirect_cloudlets(self, victim: str, now: float = 0.0) -> list[tuple[int, str]]:
        """Spread the victim's cloudlets over the other VMs, round-robin by cloudlet id.

        Survivors are visited earliest-available first (ties by vm id), so a
        lone redirected cloudlet never waits behind a busy VM while another
        is idle. Running cloudlets restart from zero.
        """
        vm = self.vms.get(victim)
        if vm is None:
            raise KeyError(f"unknown vm {victim!r}")
        survivors = sorted((v for v in self.vms if v != victim),
                           key=lambda v: (self._busy_until(self.vms[v], now), v))
        if not survivors:
            raise ValueError("no surviving VM to take redirected cloudlets")
        moving = list(vm.queue)
        if vm.running is not None:
            self.cloudlets[vm.running].restart()
            moving.append(vm.running)
            vm.running = None
            vm.run_token += 1
        vm.queue = []
        assignments = []
        for i, cid in enumerate(sorted(moving)):
            target = survivors[i % len(survivors)]
            self.vms[target].queue.append(cid)
            assignments.append((cid, target))
        return assignments

    def delete_vm(self, victim: str, now: float = 0.0) -> str:
        vm = self.vms.get(victim)
        if vm is None:
            raise KeyError(f"unknown vm {victim!r}")
        if vm.queue or vm.running is not None:
            raise ValueError(f"vm {victim!r} still holds cloudlets; redirect first")
        del self.vms[victim]
        self.provisioner.release_resource(vm.resource_id, success=False, now=now)
        self.vm_deletions += 1
        self.ended.append((victim, False))
        return vm.resource_id

    def complete_vm(self, vm_id: str, now: float = 0.0) -> str:
        vm = self.vms.get(vm_id)
        if vm is None:
            raise KeyError(f"unknown vm {vm_id!r}")
        if vm.queue or vm.running is not None:
            raise ValueError(f"vm {vm_id!r} has unfinished cloudlets")
        del self.vms[vm_id]
        self.provisioner.release_resource(vm.resource_id, success=True, now=now)
        self.ended.append((vm_id, True))
        return vm.resource_id

    # -- scaling ----------------------------------------------------------------

    def scale(self, now: float, payload_mb: float = 0.0) -> list[Action]:
        """Apply scaling decisions until the pool holds; load is re-read each time."""
        taken = []
        while True:
            action = self.rebalance()
            if action is Action.SCALE_UP:
                try:
                    self.create_vm(now, payload_mb)
                except NoResourceAvailable:
                    break
            elif action is Action.SCALE_DOWN:
                victim = self.select_victim()
                self.redirect_cloudlets(victim, now)
                self.delete_vm(victim, now)
                for v in self.vms.values():
                    self._start_next(v, now)
            else:
                break
            taken.append(action)
        return taken
