"""Synthetic cloudlet streams: exponential inter-arrival gaps, uniform sizes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Cloudlet
from .rng import stream

__all__ = ["WorkloadParams", "generate_workload"]


@dataclass(frozen=True)
class WorkloadParams:
    num_cloudlets: int = 100
    mean_interarrival_s: float = 1.0
    length_mi_min: float = 500.0
    length_mi_max: float = 2000.0
    payload_mb_min: float = 0.0
    payload_mb_max: float = 100.0
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.num_cloudlets, int) and self.num_cloudlets >= 0):
            raise ValueError(f"num_cloudlets must be an integer >= 0, got {self.num_cloudlets!r}")
        if not self.mean_interarrival_s > 0:
            raise ValueError("mean_interarrival_s must be > 0")
        if not 0 < self.length_mi_min <= self.length_mi_max:
            raise ValueError("need 0 < length_mi_min <= length_mi_max")
        if not 0 <= self.payload_mb_min <= self.payload_mb_max:
            raise ValueError("need 0 <= payload_mb_min <= payload_mb_max")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def generate_workload(params: WorkloadParams) -> list[Cloudlet]:
    n = params.num_cloudlets
    if n == 0:
        return []
    rng = stream(params.seed, "workload")
    arrivals = np.cumsum(rng.exponential(params.mean_interarrival_s, n))
    lengths = rng.uniform(params.length_mi_min, params.length_mi_max, n)
    payloads = rng.uniform(params.payload_mb_min, params.payload_mb_max, n)
    return [Cloudlet(i, float(lengths[i]), float(payloads[i]), float(arrivals[i]))
            for i in range(n)]
