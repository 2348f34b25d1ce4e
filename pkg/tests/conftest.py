import pytest

from rccpsim.cost_model import CostWeights
from rccpsim.domain import NetworkLink, OwnedResource, ResourceSpec
from rccpsim.provisioner import Provisioner, ResourceOwner
from rccpsim.scenario import parse_scenario
from rccpsim.scoring import ScoringParams

MINIMAL = """\
owners:
  - owner_id: o1
    resources:
      - {resource_id: r1, pe_count: 1, mips_per_pe: 250, ram_mb: 1024, bandwidth_mbps: 100, resource_cost: 3}
links:
  - {owner_id: o1, hops_count: 1, bandwidth_mbps: 100}
"""

SMALL_REQ = ResourceSpec(1, 100, 256, 0, 10)


def res(rid, owner="o1", pe=1, mips=250, ram=1024, cost=1.0, storage=0, bw=100):
    return OwnedResource(rid, owner, ResourceSpec(pe, mips, ram, storage, bw), cost)


def make_provisioner(catalog, links=None, policy=None, weights=CostWeights(),
                     params=ScoringParams()):
    """``catalog``: {owner_id: [OwnedResource, ...]}; links default to 1 hop, no delay."""
    links = links or {}
    owners = [ResourceOwner(oid, rs, links.get(oid, NetworkLink(oid, 1, 100, 0)))
              for oid, rs in catalog.items()]
    return Provisioner(owners, weights, params, policy=policy)


@pytest.fixture
def minimal_text():
    return MINIMAL


@pytest.fixture
def minimal_scenario():
    return parse_scenario(MINIMAL)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
