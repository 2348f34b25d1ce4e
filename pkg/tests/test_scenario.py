import pytest

from rccpsim.cost_model import CostWeights
from rccpsim.scenario import ScenarioError, parse_scenario, reference_scenario, serialize_scenario
from rccpsim.scoring import ScoringParams

from conftest import MINIMAL


def test_minimal_defaults(minimal_scenario):
    c = minimal_scenario
    assert c.scoring == ScoringParams(1.0, 0.3, 1000)
    assert c.cost_weights == CostWeights(1.0, 0.01, 1.0)
    assert (c.vmm.low_watermark, c.vmm.high_watermark) == (1, 4)
    assert c.links[0].delay_ms == 0
    assert c.owners[0].resources[0].spec.storage_mb == 0


def _err(text):
    with pytest.raises(ScenarioError) as ei:
        parse_scenario(text)
    return ei.value


def test_duplicate_resource_id():
    text = MINIMAL.replace(
        "resource_cost: 3}\n",
        "resource_cost: 3}\n      - {resource_id: r1, pe_count: 1, mips_per_pe: 1, ram_mb: 1, "
        "bandwidth_mbps: 1, resource_cost: 1}\n", 1)
    e = _err(text)
    assert "duplicate resource_id 'r1'" in str(e) and e.line == 5


def test_watermark_bound():
    e = _err(MINIMAL + "vmm: {high_watermark: 2, low_watermark: 2}\n")
    assert "bound violation" in str(e) and e.path == "vmm" and e.line == 7


def test_syntax_error_has_line():
    e = _err(MINIMAL + "workload: {num_cloudlets: [\n")
    assert "syntax error" in str(e) and e.line is not None


def test_unknown_key():
    e = _err(MINIMAL + "scoring: {beta: 1, gamma: 2}\n")
    assert "unknown key 'gamma'" in str(e) and e.path == "scoring.gamma"


def test_field_bound_names_field():
    e = _err(MINIMAL.replace("pe_count: 1", "pe_count: 0"))
    assert e.path == "owners[0].resources[0]" and "pe_count" in str(e) and e.line == 4


def test_wrong_type():
    e = _err(MINIMAL.replace("hops_count: 1", "hops_count: two"))
    assert e.path == "links[0].hops_count" and "expected integer" in str(e)


def test_owner_without_link():
    text = MINIMAL.replace("links:", "  - owner_id: o2\n    resources: []\nlinks:")
    assert "has no link" in str(_err(text))


def test_link_for_unknown_owner_and_duplicate_link():
    assert "unknown owner" in str(_err(MINIMAL + "  - {owner_id: zz, hops_count: 1, bandwidth_mbps: 1}\n"))
    assert "duplicate link" in str(_err(MINIMAL + "  - {owner_id: o1, hops_count: 1, bandwidth_mbps: 1}\n"))


def test_duplicate_yaml_key():
    assert "duplicate key" in str(_err(MINIMAL + "scoring: {beta: 1, beta: 2}\n"))


def test_round_trip(minimal_scenario):
    for cfg in (minimal_scenario, reference_scenario()):
        text = serialize_scenario(cfg)
        assert parse_scenario(text) == cfg
        assert serialize_scenario(parse_scenario(text)) == text


def test_reference_shape():
    ref = reference_scenario()
    assert len(ref.owners) == 5 and all(len(o.resources) == 4 for o in ref.owners)
    assert ref.workload.num_cloudlets == 200
