"""
Scoring and cost formulas
=========================

Communication cost, cost factor, reliability, PF and PV on a few hand-made
resources, and how the ranking reacts to beta.
"""

# %%
from rccpsim.cost_model import CostWeights, cost_factor, link_communication_cost
from rccpsim.domain import NetworkLink
from rccpsim.scoring import (ReliabilityStats, ScoringParams, performance_factor,
                             popularity_value, rank_candidates, reliability)

near = NetworkLink("o1", hops_count=1, bandwidth_mbps=1000, delay_ms=5)
far = NetworkLink("o4", hops_count=4, bandwidth_mbps=100, delay_ms=80)

for link in (near, far):
    lcc = link_communication_cost(link, payload_mb=100)
    print(link.owner_id, "L_CC =", round(lcc, 4), " CF at price 4 =", round(cost_factor(4, lcc), 4))

# heavier weight on delay
print("delay-heavy:", link_communication_cost(far, 100, CostWeights(w_delay=0.1)))

# %%
# Laplace-smoothed reliability: no history gives 0.5
for s, f in [(0, 0), (3, 0), (3, 3), (0, 5)]:
    print(f"s={s} f={f} R={reliability(ReliabilityStats(s, f)):.3f}")

# %%
# candidates: (id, R, C, E_T)
raw = [("a", 0.9, 5.0, 2.0), ("b", 0.5, 3.0, 1.5), ("c", 0.75, 4.5, 1.2), ("d", 0.75, 4.5, 2.4)]
for beta in (0.1, 1, 7):
    p = ScoringParams(beta=beta)
    ranked = rank_candidates([(rid, performance_factor(p, r, c, et), popularity_value(et))
                              for rid, r, c, et in raw])
    print(f"beta={beta:<4}", [(rid, round(pf, 4)) for rid, pf, _ in ranked])
# beta scales every PF alike, so the order never changes
