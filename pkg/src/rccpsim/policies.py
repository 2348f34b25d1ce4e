"""Allocation policies: ERA and the comparison baselines.

A policy picks which RAL entry to grant (RAL hit) and which owner offer to
lease (RAL miss). All policies consult the RAL first, so they differ only in
those two choices.
"""

from __future__ import annotations

from .provisioner import NoResourceAvailable, Provisioner, select_offer
from .rng import stream

__all__ = ["POLICY_NAMES", "make_policy", "EraPolicy", "FirstFitPolicy",
           "RandomPolicy", "MinCostPolicy", "baseline_allocate", "NoResourceAvailable"]


class EraPolicy:
    name = "era"

    def choose_entry(self, prov: Provisioner, candidates):
        return prov.era_choice(candidates)

    def choose_offer(self, prov: Provisioner, offers):
        return select_offer(offers)


class FirstFitPolicy:
    name = "first-fit"

    def choose_entry(self, prov, candidates):
        return min(candidates, key=lambda e: e.resource_id)

    def choose_offer(self, prov, offers):
        return min(offers, key=lambda o: o.resource_id)


class RandomPolicy:
    name = "random"

    def __init__(self, seed: int = 0):
        self.rng = stream(seed, "policy:random")

    def _pick(self, items):
        items = sorted(items, key=lambda x: x.resource_id)
        return items[int(self.rng.integers(len(items)))]

    def choose_entry(self, prov, candidates):
        return self._pick(candidates)

    def choose_offer(self, prov, offers):
        return self._pick(offers)


class MinCostPolicy:
    """Cheapest by cost factor everywhere; PF never consulted."""

    name = "min-cost"

    def choose_entry(self, prov, candidates):
        return min(candidates, key=lambda e: (e.utilization_cost, e.resource_id))

    def choose_offer(self, prov, offers):
        return select_offer(offers)


_POLICIES = {p.name: p for p in (EraPolicy, FirstFitPolicy, RandomPolicy, MinCostPolicy)}
POLICY_NAMES = tuple(_POLICIES)


def make_policy(name: str, seed: int = 0):
    try:
        cls = _POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; valid names: {', '.join(POLICY_NAMES)}") from None
    return cls(seed) if cls is RandomPolicy else cls()


def baseline_allocate(policy, prov: Provisioner, request, seed: int = 0, *,
                      vm_id: str = "vm", payload_mb: float = 0.0, now: float = 0.0) -> str:
    """Run one request through ``prov`` under ``policy`` (a name or instance).

    Raises NoResourceAvailable when nothing satisfies ``request``.
    """
    if isinstance(policy, str):
        policy = make_policy(policy, seed)
    saved, prov.policy = prov.policy, policy
    try:
        rid, _ = prov.handle_vm_request(request, payload_mb, vm_id, now)
    finally:
        prov.policy = saved
    return rid
