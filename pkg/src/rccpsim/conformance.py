"""Stand-alone validator for exported protocol traces.

Works on the line-delimited JSON dump only, so it shares no code with the
provisioner that produced the trace.
"""

from __future__ import annotations

import json
import re
from collections import defaultdict

__all__ = ["HIT", "MISS", "RELEASE", "classify", "validate_dump", "split_traces"]

HIT = "ral-hit"
MISS = "ral-miss"
RELEASE = "release"

_ABBREV = {
    "VmRequest": "V", "RalHit": "H", "RalMiss": "M", "AvailabilityQuery": "Q",
    "AvailabilityAck": "A", "OfferSelected": "S", "AcquireRequest": "R",
    "AccessGranted": "G", "RalUpdated": "U", "GrantToVmm": "T",
    "ReleaseToProvisioner": "X", "RalReleased": "Y",
}
_ACTOR = {
    "VmRequest": "VMM", "RalHit": "Provisioner", "RalMiss": "Provisioner",
    "AvailabilityQuery": "Provisioner", "AvailabilityAck": "Owner",
    "OfferSelected": "Provisioner", "AcquireRequest": "Provisioner",
    "AccessGranted": "Owner", "RalUpdated": "Provisioner", "GrantToVmm": "Provisioner",
    "ReleaseToProvisioner": "VMM", "RalReleased": "Provisioner",
}
_SHAPES = {
    HIT: re.compile(r"VHT"),
    MISS: re.compile(r"VM(Q+)(A+)SRGUT"),
    RELEASE: re.compile(r"XY"),
}


def split_traces(text: str) -> dict[int, list[dict]]:
    traces = defaultdict(list)
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        rec = json.loads(line)
        traces[rec["trace"]].append(rec)
    return dict(traces)


def classify(messages: list[dict]) -> str | None:
    """Shape name if ``messages`` is one canonical sequence, else None."""
    try:
        word = "".join(_ABBREV[m["step"]] for m in messages)
    except KeyError:
        return None
    if any(m["actor"] != _ACTOR[m["step"]] for m in messages):
        return None
    if any(b["time"] < a["time"] for a, b in zip(messages, messages[1:])):
        return None
    for name, pat in _SHAPES.items():
        m = pat.fullmatch(word)
        if m is None:
            continue
        if name == MISS:
            queried = [x["ids"][0] for x in messages if x["step"] == "AvailabilityQuery"]
            acked = [x["ids"][0] for x in messages if x["step"] == "AvailabilityAck"]
            if len(set(queried)) != len(queried) or sorted(acked) != sorted(queried):
                return None
            sel = next(x for x in messages if x["step"] == "OfferSelected")["ids"][0]
            if any(x["ids"][0] != sel for x in messages
                   if x["step"] in ("AcquireRequest", "AccessGranted", "RalUpdated")):
                return None
            if messages[-1]["ids"][1] != sel:
                return None
        if name == HIT and messages[-1]["ids"][1] not in messages[1]["ids"]:
            return None
        return name
    return None


def validate_dump(text: str) -> dict:
    """Count traces by shape; ``violations`` lists trace ids matching none."""
    counts = {HIT: 0, MISS: 0, RELEASE: 0}
    violations = []
    for tid, msgs in sorted(split_traces(text).items()):
        shape = classify(msgs)
        if shape is None:
            violations.append(tid)
        else:
            counts[shape] += 1
    return {"counts": counts, "violations": violations}
