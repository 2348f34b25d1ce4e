"""Reliability and execution-time history, and the PF / PV ranking scores."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ReliabilityStats", "ExecTimeEstimate", "ScoringParams",
    "reliability", "record_outcome", "record_execution_time",
    "initial_estimate", "performance_factor", "popularity_value",
    "rank_key", "rank_candidates",
]


@dataclass(frozen=True)
class ReliabilityStats:
    successes: int = 0
    failures: int = 0

    def __post_init__(self):
        if self.successes < 0 or self.failures < 0:
            raise ValueError("reliability counts must be >= 0")


@dataclass(frozen=True)
class ExecTimeEstimate:
    et_seconds: float
    observations: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.et_seconds) and self.et_seconds > 0):
            raise ValueError(f"et_seconds must be > 0, got {self.et_seconds!r}")


@dataclass(frozen=True)
class ScoringParams:
    beta: float = 1.0
    ema_alpha: float = 0.3
    reference_cloudlet_mi: float = 1000.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if not 0 < self.ema_alpha <= 1:
            raise ValueError(f"ema_alpha must be in (0, 1], got {self.ema_alpha!r}")
        if not self.reference_cloudlet_mi > 0:
            raise ValueError("reference_cloudlet_mi must be > 0")


def reliability(stats: ReliabilityStats) -> float:
    """Laplace-smoothed success rate; 0.5 for an unobserved resource."""
    return (stats.successes + 1) / (stats.successes + stats.failures + 2)


def record_outcome(stats: ReliabilityStats, success: bool) -> ReliabilityStats:
    if success:
        return ReliabilityStats(stats.successes + 1, stats.failures)
    return ReliabilityStats(stats.successes, stats.failures + 1)


def record_execution_time(est: ExecTimeEstimate, observed_seconds: float,
                          params: ScoringParams = ScoringParams()) -> ExecTimeEstimate:
    """Fold one observed runtime into the estimate (exponential moving average)."""
    if not observed_seconds > 0:
        raise ValueError(f"observed_seconds must be > 0, got {observed_seconds!r}")
    a = params.ema_alpha
    return ExecTimeEstimate(a * observed_seconds + (1 - a) * est.et_seconds,
                            est.observations + 1)


def initial_estimate(total_mips: float,
                     params: ScoringParams = ScoringParams()) -> ExecTimeEstimate:
    """Capacity-derived estimate for a resource that has run nothing yet."""
    return ExecTimeEstimate(params.reference_cloudlet_mi / total_mips, 0)


def performance_factor(params: ScoringParams, r: float, c: float, et: float) -> float:
    """``beta * r / (c * et)``."""
    if not c > 0:
        raise ValueError(f"cost must be > 0, got {c!r}")
    if not et > 0:
        raise ValueError(f"execution time must be > 0, got {et!r}")
    return params.beta * r / (c * et)


def popularity_value(et: float) -> float:
    if not et > 0:
        raise ValueError(f"execution time must be > 0, got {et!r}")
    return 1.0 / et


def rank_key(candidate):
    rid, pf, pv = candidate
    return (-pf, -pv, rid)


def rank_candidates(candidates):
    """Order ``(resource_id, pf, pv)`` triples best first.

    PF descending, then PV descending, then resource id ascending.
    """
    if not candidates:
        raise ValueError("cannot rank an empty candidate list")
    for rid, pf, pv in candidates:
        if not (math.isfinite(pf) and math.isfinite(pv)):
            raise ValueError(f"non-finite score for {rid!r}")
    return sorted(candidates, key=rank_key)
