import random

import pytest

from rccpsim.cost_model import CostWeights, cost_factor, link_communication_cost
from rccpsim.domain import NetworkLink, ResourceSpec, spec_satisfies
from rccpsim.provisioner import (
    NoResourceAvailable, OwnerOffer, ProtocolTrace, ReliabilityStats, dump_traces, select_offer,
)
from rccpsim.scoring import ExecTimeEstimate

from conftest import SMALL_REQ, make_provisioner, res

HIT = ["VmRequest", "RalHit", "GrantToVmm"]


def miss(n_owners):
    return (["VmRequest", "RalMiss"] + ["AvailabilityQuery"] * n_owners
            + ["AvailabilityAck"] * n_owners
            + ["OfferSelected", "AcquireRequest", "AccessGranted", "RalUpdated", "GrantToVmm"])


def test_miss_then_hit_paths():
    prov = make_provisioner({"o1": [res("r1")]})
    rid, tr = prov.handle_vm_request(SMALL_REQ, 0, "vm-a")
    assert rid == "r1" and tr.tags == miss(1)
    assert prov.ral["r1"].state == "Allocated(vm-a)"
    prov.release_resource("r1", True)
    rid, tr = prov.handle_vm_request(SMALL_REQ, 0, "vm-b")
    assert rid == "r1" and tr.tags == HIT
    assert prov.total_cost == 1.0 + 1.0  # one lease: R_C 1 + one hop


def test_single_satisfying_ral_entry_granted():
    prov = make_provisioner({"o1": [res("r1"), res("r2", ram=10)]})
    for o in prov.query_owners(SMALL_REQ):
        prov.acquire_resource(o)
    rid, tr = prov.handle_vm_request(SMALL_REQ, 0, "vm")
    assert rid == "r1" and tr.tags == HIT


def test_no_resource_available():
    prov = make_provisioner({"o1": [res("r1", pe=1)]})
    with pytest.raises(NoResourceAvailable):
        prov.handle_vm_request(ResourceSpec(4, 100, 256), 0, "vm")
    assert prov.traces == [] and prov.rejected == 1


def _seed_ral(prov, rng):
    for o in prov.query_owners(SMALL_REQ):
        e = prov.acquire_resource(o)
        e.stats = ReliabilityStats(rng.randint(0, 9), rng.randint(0, 9))
        e.et = ExecTimeEstimate(rng.uniform(0.5, 30))


def _max_pf(prov, entries):
    best = None
    for e in entries:
        key = (prov.pf(e), prov.pv(e))
        if best is None or key > best[1] or (key == best[1] and e.resource_id < best[0]):
            best = (e.resource_id, key)
    return best[0]


def test_ral_hit_grants_argmax_pf():
    rng = random.Random(3)
    prov = make_provisioner({"o1": [res(f"r{i}", cost=rng.uniform(1, 9)) for i in range(5)]})
    _seed_ral(prov, rng)
    expected = _max_pf(prov, prov.ral.values())
    rid, tr = prov.handle_vm_request(SMALL_REQ, 0, "vm")
    assert rid == expected and tr.tags == HIT


def test_check_ral():
    prov = make_provisioner({"o1": [res("r1"), res("r2", pe=2), res("r3", ram=10)]})
    assert prov.check_ral(SMALL_REQ) == []
    for o in prov.query_owners(ResourceSpec(1, 1, 1)):
        prov.acquire_resource(o)
    prov.ral["r1"].allocated_to = "vm-x"
    got = prov.check_ral(SMALL_REQ)
    oracle = [e for e in list(prov.ral.values())
              if e.allocated_to is None and spec_satisfies(e.resource.spec, SMALL_REQ)]
    assert sorted(e.resource_id for e in got) == sorted(e.resource_id for e in oracle) == ["r2"]


def test_only_allocated_entry_is_a_miss():
    prov = make_provisioner({"o1": [res("r1")]})
    prov.handle_vm_request(SMALL_REQ, 0, "vm")
    assert prov.check_ral(SMALL_REQ) == []


def test_query_owners():
    assert make_provisioner({}).query_owners(SMALL_REQ) == []
    link = NetworkLink("o1", 2, 50, 50)
    prov = make_provisioner({"o1": [res("r1", cost=3)]}, links={"o1": link})
    (offer,) = prov.query_owners(SMALL_REQ, payload_mb=100)
    assert offer.cf == pytest.approx(7.5, abs=1e-12)
    prov.acquire_resource(offer)
    assert prov.query_owners(SMALL_REQ, 100) == []


def _offer(rid, cf):
    return OwnerOffer(res(rid), NetworkLink("o1", 1, 1), cf)


def test_select_offer():
    assert select_offer([_offer("a", 7), _offer("b", 4.5), _offer("c", 9)]).resource_id == "b"
    assert select_offer([_offer("a", 3)]).resource_id == "a"
    assert select_offer([_offer("B", 2), _offer("A", 2)]).resource_id == "A"
    with pytest.raises(ValueError):
        select_offer([])


def test_select_offer_random_oracle():
    rng = random.Random(5)
    for _ in range(300):
        offers = [_offer(f"r{i}", rng.choice([1.0, 2.0, rng.uniform(0, 10)])) for i in range(rng.randint(1, 12))]
        best = offers[0]
        for o in offers[1:]:
            if o.cf < best.cf or (o.cf == best.cf and o.resource_id < best.resource_id):
                best = o
        assert select_offer(offers) is best


def test_acquire_ledger():
    prov = make_provisioner({"o1": [res("r1", cost=2)]})
    (offer,) = prov.query_owners(SMALL_REQ)
    prov.acquire_resource(offer)
    assert len(prov.ral) == 1
    with pytest.raises(ValueError):
        prov.acquire_resource(offer)
    prov.return_to_owner("r1")
    (offer,) = prov.query_owners(SMALL_REQ)
    prov.acquire_resource(offer)
    assert len(prov.ral) == 1
    assert [cf for _, cf in prov.charges] == [3.0, 3.0]


def test_total_cost_is_sum_of_offer_cfs():
    rng = random.Random(8)
    cat = {f"o{k}": [res(f"o{k}r{i}", owner=f"o{k}", cost=rng.uniform(0, 5)) for i in range(3)]
           for k in range(4)}
    links = {o: NetworkLink(o, rng.randint(1, 5), rng.uniform(10, 100), rng.uniform(0, 50)) for o in cat}
    prov = make_provisioner(cat, links)
    offers = prov.query_owners(SMALL_REQ, payload_mb=40)
    expected = 0.0
    for o in offers:
        expected += cost_factor(o.resource.resource_cost,
                                link_communication_cost(links[o.resource.owner_id], 40, CostWeights()))
        prov.acquire_resource(o)
    assert prov.total_cost == pytest.approx(expected, rel=1e-12)


def test_allocate_to_vmm():
    prov = make_provisioner({"o1": [res("r1"), res("r2")]})
    for o in prov.query_owners(SMALL_REQ):
        prov.acquire_resource(o)
    with pytest.raises(ValueError):
        prov.allocate_to_vmm([], "vm")
    # PF 0.8 vs 0.2 via reliability and E_T
    prov.ral["r1"].et = ExecTimeEstimate(4 * prov.ral["r2"].et.et_seconds)
    tr = ProtocolTrace(0, "allocation")
    assert prov.allocate_to_vmm(list(prov.ral.values()), "vm", tr) == "r2"
    assert tr.tags == ["GrantToVmm"]
    assert prov.allocate_to_vmm([prov.ral["r1"]], "vm2") == "r1"


def test_allocate_random_oracle():
    rng = random.Random(21)
    for trial in range(50):
        prov = make_provisioner({"o1": [res(f"r{i:02d}", cost=rng.uniform(0.5, 9)) for i in range(10)]})
        _seed_ral(prov, rng)
        cands = list(prov.ral.values())
        assert prov.allocate_to_vmm(cands, "vm") == _max_pf(prov, cands)


def test_release():
    prov = make_provisioner({"o1": [res("r1")]})
    prov.handle_vm_request(SMALL_REQ, 0, "vm")
    e = prov.release_resource("r1", True)
    assert e.available and e.stats == ReliabilityStats(1, 0)
    assert prov.traces[-1].tags == ["ReleaseToProvisioner", "RalReleased"]
    with pytest.raises(ValueError):
        prov.release_resource("r1", True)
    prov.handle_vm_request(SMALL_REQ, 0, "vm2")
    assert prov.release_resource("r1", False).stats == ReliabilityStats(1, 1)
    with pytest.raises(KeyError):
        prov.release_resource("nope", True)


def test_ral_conservation_and_delays():
    links = {"o1": NetworkLink("o1", 1, 100, 30), "o2": NetworkLink("o2", 1, 100, 10)}
    prov = make_provisioner({"o1": [res("a", cost=1)], "o2": [res("b", owner="o2", cost=9)]}, links)
    assert prov.ral_conserved()
    rid, tr = prov.handle_vm_request(SMALL_REQ, 0, "vm", now=5.0)
    assert prov.ral_conserved()
    assert rid == "a"
    assert tr.messages[-1].time >= 5.0 + 2 * 0.030
    times = [m.time for m in tr.messages]
    assert times == sorted(times)


def test_dump_traces_lines():
    prov = make_provisioner({"o1": [res("r1")]})
    prov.handle_vm_request(SMALL_REQ, 0, "vm")
    text = dump_traces(prov.traces)
    assert len(text.splitlines()) == len(miss(1))
    assert dump_traces([]) == ""
