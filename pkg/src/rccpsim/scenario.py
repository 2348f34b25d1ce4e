"""Scenario files: YAML documents validated into a :class:`ScenarioConfig`.

Errors carry the line number and dotted field path of the offending value.
See ``data/reference.yaml`` for an annotated example.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import yaml
from yaml.constructor import SafeConstructor

from .cost_model import CostWeights
from .domain import NetworkLink, OwnedResource, ResourceSpec
from .provisioner import ResourceOwner
from .scoring import ScoringParams
from .workload import WorkloadParams

__all__ = ["ScenarioError", "ScenarioConfig", "OwnerConfig", "VmmConfig",
           "parse_scenario", "load_scenario", "serialize_scenario", "reference_scenario"]


class ScenarioError(ValueError):
    def __init__(self, msg: str, line: int | None = None, path: str = ""):
        self.line, self.path = line, path
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(f"field '{path}'")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)


@dataclass(frozen=True)
class OwnerConfig:
    owner_id: str
    resources: tuple[OwnedResource, ...]


@dataclass(frozen=True)
class VmmConfig:
    initial_vms: int = 1
    high_watermark: float = 4
    low_watermark: float = 1
    vm_request_spec: ResourceSpec = ResourceSpec(1, 1, 1, 0, 1)

    def __post_init__(self):
        if not (isinstance(self.initial_vms, int) and self.initial_vms >= 0):
            raise ValueError(f"initial_vms must be an integer >= 0, got {self.initial_vms!r}")
        if not 0 <= self.low_watermark < self.high_watermark:
            raise ValueError(f"need 0 <= low_watermark < high_watermark, "
                             f"got {self.low_watermark} and {self.high_watermark}")


@dataclass(frozen=True)
class ScenarioConfig:
    owners: tuple[OwnerConfig, ...]
    links: tuple[NetworkLink, ...]
    workload: WorkloadParams = WorkloadParams()
    vmm: VmmConfig = VmmConfig()
    scoring: ScoringParams = ScoringParams()
    cost_weights: CostWeights = CostWeights()
    name: str = field(default="", compare=False)

    def build_owners(self) -> list[ResourceOwner]:
        link = {l.owner_id: l for l in self.links}
        return [ResourceOwner(o.owner_id, o.resources, link[o.owner_id]) for o in self.owners]


# -- YAML -> plain data, remembering where every value came from -------------

class _Located:
    __slots__ = ("value", "line")

    def __init__(self, value, line):
        self.value, self.line = value, line


_scalar = SafeConstructor()


def _to_located(node):
    line = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for knode, vnode in node.value:
            key = _scalar.construct_object(knode)
            if key in out:
                raise ScenarioError(f"duplicate key {key!r}", knode.start_mark.line + 1)
            out[key] = _to_located(vnode)
        return _Located(out, line)
    if isinstance(node, yaml.SequenceNode):
        return _Located([_to_located(n) for n in node.value], line)
    return _Located(_scalar.construct_object(node), line)


def _strip(loc):
    v = loc.value
    if isinstance(v, dict):
        return {k: _strip(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_strip(x) for x in v]
    return v


_INT, _NUM, _STR = "integer", "number", "string"


def _check_type(loc: _Located, kind: str, path: str):
    v = loc.value
    ok = {
        _INT: isinstance(v, int) and not isinstance(v, bool),
        _NUM: isinstance(v, (int, float)) and not isinstance(v, bool),
        _STR: isinstance(v, str) and v != "",
    }[kind]
    if not ok:
        raise ScenarioError(f"expected {kind}, got {v!r}", loc.line, path)
    return v


def _mapping(loc: _Located, path: str, schema: dict, required=()):
    """Validate a mapping against ``{key: kind}``; returns plain values."""
    if not isinstance(loc.value, dict):
        raise ScenarioError("expected a mapping", loc.line, path)
    out = {}
    for key, item in loc.value.items():
        sub = f"{path}.{key}" if path else str(key)
        if key not in schema:
            raise ScenarioError(f"unknown key {key!r}; allowed: {', '.join(schema)}", item.line, sub)
        kind = schema[key]
        out[key] = item if kind is None else _check_type(item, kind, sub)
    for key in required:
        if key not in out:
            raise ScenarioError(f"missing required key {key!r}", loc.line, path)
    return out


def _sequence(loc: _Located, path: str):
    if not isinstance(loc.value, list):
        raise ScenarioError("expected a list", loc.line, path)
    return loc.value


def _build(factory, kwargs, loc: _Located, path: str):
    try:
        return factory(**kwargs)
    except ValueError as e:
        raise ScenarioError(f"bound violation: {e}", loc.line, path) from None


_SPEC_KEYS = {"pe_count": _INT, "mips_per_pe": _NUM, "ram_mb": _NUM,
              "storage_mb": _NUM, "bandwidth_mbps": _NUM}
_RESOURCE_KEYS = {"resource_id": _STR, **_SPEC_KEYS, "resource_cost": _NUM}
_LINK_KEYS = {"owner_id": _STR, "hops_count": _INT, "bandwidth_mbps": _NUM, "delay_ms": _NUM}
_WORKLOAD_KEYS = {f.name: (_INT if f.name in ("num_cloudlets", "seed") else _NUM)
                  for f in fields(WorkloadParams)}
_SCORING_KEYS = {"beta": _NUM, "ema_alpha": _NUM, "reference_cloudlet_mi": _NUM}
_WEIGHT_KEYS = {"w_hops": _NUM, "w_delay": _NUM, "w_transfer": _NUM}
_VMM_KEYS = {"initial_vms": _INT, "high_watermark": _NUM, "low_watermark": _NUM,
             "vm_request_spec": None}
_TOP_KEYS = {"name": _STR, "owners": None, "links": None, "workload": None, "vmm": None,
             "scoring": None, "cost_weights": None}


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario document."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark else None
        raise ScenarioError(f"syntax error: {e.problem}", line) from None
    if node is None:
        raise ScenarioError("empty scenario document")
    root = _to_located(node)
    top = _mapping(root, "", _TOP_KEYS, required=("owners", "links"))

    owners, seen_res = [], {}
    for i, oloc in enumerate(_sequence(top["owners"], "owners")):
        opath = f"owners[{i}]"
        o = _mapping(oloc, opath, {"owner_id": _STR, "resources": None},
                     required=("owner_id", "resources"))
        if any(x.owner_id == o["owner_id"] for x in owners):
            raise ScenarioError(f"duplicate owner_id {o['owner_id']!r}", oloc.line, f"{opath}.owner_id")
        resources = []
        for j, rloc in enumerate(_sequence(o["resources"], f"{opath}.resources")):
            rpath = f"{opath}.resources[{j}]"
            r = _mapping(rloc, rpath, _RESOURCE_KEYS,
                         required=("resource_id", "pe_count", "mips_per_pe", "ram_mb",
                                   "bandwidth_mbps", "resource_cost"))
            rid = r["resource_id"]
            if rid in seen_res:
                raise ScenarioError(f"duplicate resource_id {rid!r} (first at line {seen_res[rid]})",
                                    rloc.line, f"{rpath}.resource_id")
            seen_res[rid] = rloc.line
            spec = _build(ResourceSpec, {k: r[k] for k in _SPEC_KEYS if k in r}, rloc, rpath)
            resources.append(_build(OwnedResource, dict(resource_id=rid, owner_id=o["owner_id"],
                                                        spec=spec, resource_cost=r["resource_cost"]),
                                    rloc, rpath))
        owners.append(OwnerConfig(o["owner_id"], tuple(resources)))

    links = []
    owner_ids = {o.owner_id for o in owners}
    for i, lloc in enumerate(_sequence(top["links"], "links")):
        lpath = f"links[{i}]"
        l = _mapping(lloc, lpath, _LINK_KEYS, required=("owner_id", "hops_count", "bandwidth_mbps"))
        if l["owner_id"] not in owner_ids:
            raise ScenarioError(f"link for unknown owner {l['owner_id']!r}", lloc.line, f"{lpath}.owner_id")
        if any(x.owner_id == l["owner_id"] for x in links):
            raise ScenarioError(f"duplicate link for owner {l['owner_id']!r}", lloc.line, f"{lpath}.owner_id")
        links.append(_build(NetworkLink, l, lloc, lpath))
    linked = {l.owner_id for l in links}
    for o, oloc in zip(owners, top["owners"].value):
        if o.owner_id not in linked:
            raise ScenarioError(f"owner {o.owner_id!r} has no link", oloc.line, "links")

    kw = {}
    if "workload" in top:
        kw["workload"] = _build(WorkloadParams, _mapping(top["workload"], "workload", _WORKLOAD_KEYS),
                                top["workload"], "workload")
    if "scoring" in top:
        kw["scoring"] = _build(ScoringParams, _mapping(top["scoring"], "scoring", _SCORING_KEYS),
                               top["scoring"], "scoring")
    if "cost_weights" in top:
        kw["cost_weights"] = _build(CostWeights, _mapping(top["cost_weights"], "cost_weights", _WEIGHT_KEYS),
                                    top["cost_weights"], "cost_weights")
    if "vmm" in top:
        v = _mapping(top["vmm"], "vmm", _VMM_KEYS)
        if "vm_request_spec" in v:
            sloc = v["vm_request_spec"]
            v["vm_request_spec"] = _build(ResourceSpec, _mapping(sloc, "vmm.vm_request_spec", _SPEC_KEYS,
                                                                 required=("pe_count", "mips_per_pe", "ram_mb")),
                                          sloc, "vmm.vm_request_spec")
        kw["vmm"] = _build(VmmConfig, v, top["vmm"], "vmm")
    return ScenarioConfig(tuple(owners), tuple(links), name=top.get("name", ""), **kw)


def load_scenario(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _spec_dict(s: ResourceSpec) -> dict:
    return {f.name: getattr(s, f.name) for f in fields(ResourceSpec)}


def _flat(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in fields(obj)}


def serialize_scenario(cfg: ScenarioConfig) -> str:
    """Inverse of :func:`parse_scenario`; every field written explicitly."""
    doc = {}
    if cfg.name:
        doc["name"] = cfg.name
    doc["owners"] = [{"owner_id": o.owner_id,
                      "resources": [{"resource_id": r.resource_id, **_spec_dict(r.spec),
                                     "resource_cost": r.resource_cost} for r in o.resources]}
                     for o in cfg.owners]
    doc["links"] = [_flat(l) for l in cfg.links]
    doc["workload"] = _flat(cfg.workload)
    doc["vmm"] = {**_flat(cfg.vmm), "vm_request_spec": _spec_dict(cfg.vmm.vm_request_spec)}
    doc["scoring"] = _flat(cfg.scoring)
    doc["cost_weights"] = _flat(cfg.cost_weights)
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def reference_scenario() -> ScenarioConfig:
    """The bundled 5-owner x 4-resource comparison scenario."""
    from importlib.resources import files
    return parse_scenario(files("rccpsim").joinpath("data/reference.yaml").read_text())
