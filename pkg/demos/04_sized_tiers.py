"""
When cheapest-first acquisition costs more
==========================================

ERA leases the offer with the lowest cost factor and ignores its capacity.
If owners sell small, medium and large resources priced by capacity, the
cheapest lease is also the slowest, so more VMs get created and the total
bill can end up above the baselines. This script builds such a scenario
from the reference one and compares the policies.
"""

# %%
import dataclasses

import numpy as np

from rccpsim import reference_scenario
from rccpsim.domain import OwnedResource, ResourceSpec
from rccpsim.engine import Simulation
from rccpsim.policies import POLICY_NAMES
from rccpsim.scenario import OwnerConfig

base = reference_scenario()

# (pe_count, mips_per_pe) tiers; price roughly linear in total MIPS
tiers = [(1, 500), (2, 500), (2, 1000), (4, 1000)]
markup = {"o1": 1.2, "o2": 0.9, "o3": 1.0, "o4": 0.85, "o5": 1.1}

owners = []
for o in base.owners:
    res = [OwnedResource(f"{o.owner_id}-t{k}", o.owner_id,
                         ResourceSpec(pe, mips, 2048 * pe, 10000, 200),
                         round(markup[o.owner_id] * (1 + pe * mips / 500), 3))
           for k, (pe, mips) in enumerate(tiers)]
    owners.append(OwnerConfig(o.owner_id, tuple(res)))
tiered = dataclasses.replace(base, owners=tuple(owners), name="sized-tiers")

# %%
for name, sc in (("reference", base), ("sized-tiers", tiered)):
    print(name)
    for p in POLICY_NAMES:
        rs = [Simulation(sc, p, s).run() for s in range(40)]
        print(f"  {p:10s} cost {np.mean([r.total_cost for r in rs]):8.2f}"
              f"  makespan {np.mean([r.makespan_s for r in rs]):8.2f}s"
              f"  acquisitions {np.mean([r.acquisitions for r in rs]):5.1f}")
