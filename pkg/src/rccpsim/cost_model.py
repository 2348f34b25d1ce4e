"""Monetary quantities the provisioner optimizes: link cost and cost factor."""

from __future__ import annotations

from dataclasses import dataclass

from .domain import NetworkLink

__all__ = ["CostWeights", "link_communication_cost", "cost_factor",
           "resource_utilization_cost"]


@dataclass(frozen=True)
class CostWeights:
    """Coefficients combining hops, delay and transfer time into one link cost."""

    w_hops: float = 1.0
    w_delay: float = 0.01
    w_transfer: float = 1.0

    def __post_init__(self):
        ws = (self.w_hops, self.w_delay, self.w_transfer)
        if any(w < 0 for w in ws):
            raise ValueError(f"cost weights must be >= 0, got {ws}")
        if not any(w > 0 for w in ws):
            raise ValueError("at least one cost weight must be > 0")


def link_communication_cost(link: NetworkLink, payload_mb: float,
                            weights: CostWeights = CostWeights()) -> float:
    """Cost of bringing a resource's access across ``link``.

    Linear in the three link factors: ``w_hops*hops + w_delay*delay_ms +
    w_transfer*payload/bandwidth`` (the last term is transfer seconds).
    """
    if payload_mb < 0:
        raise ValueError(f"payload_mb must be >= 0, got {payload_mb!r}")
    return (weights.w_hops * link.hops_count
            + weights.w_delay * link.delay_ms
            + weights.w_transfer * (payload_mb / link.bandwidth_mbps))


def cost_factor(r_c: float, l_cc: float) -> float:
    if r_c < 0 or l_cc < 0:
        raise ValueError(f"costs must be >= 0, got ({r_c!r}, {l_cc!r})")
    return r_c + l_cc


def resource_utilization_cost(r_c: float, l_cc: float) -> float:
    # same two constituents as the cost factor; kept as a named alias
    return cost_factor(r_c, l_cc)
