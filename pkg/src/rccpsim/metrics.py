"""Per-run metrics and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields

__all__ = ["MetricsRecord", "write_metrics", "parse_metrics", "METRIC_FIELDS"]


@dataclass(frozen=True)
class MetricsRecord:
    run_id: str
    policy: str
    seed: int
    total_cost: float
    mean_cost_per_cloudlet: float
    makespan_s: float
    mean_cloudlet_turnaround_s: float
    vm_creations: int
    vm_deletions: int
    acquisitions: int
    cloudlets_completed: int
    mean_pf_of_grants: float


METRIC_FIELDS = tuple(f.name for f in fields(MetricsRecord))
_TYPES = {f.name: f.type for f in fields(MetricsRecord)}


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_metrics(records, header: bool = True) -> str:
    """CSV text, rows ordered by run_id; floats with 6 fractional digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(METRIC_FIELDS)
    for rec in sorted(records, key=lambda r: r.run_id):
        w.writerow([_fmt(v) for v in astuple(rec)])
    return buf.getvalue()


def parse_metrics(text: str) -> list[MetricsRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    if tuple(rows[0]) != METRIC_FIELDS:
        raise ValueError(f"unexpected metrics header: {rows[0]}")
    conv = {"str": str, "int": int, "float": float}
    out = []
    for row in rows[1:]:
        if row == rows[0]:
            continue  # repeated header from appended runs
        out.append(MetricsRecord(*(conv[_TYPES[k]](v) for k, v in zip(METRIC_FIELDS, row))))
    return out
