"""
One simulation with its protocol trace
======================================

Runs ERA on the bundled reference scenario, prints the metrics row and the
first few protocol traces, then checks every trace with the conformance
validator.
"""

# %%
from rccpsim import reference_scenario
from rccpsim.audit import Auditor
from rccpsim.conformance import validate_dump
from rccpsim.engine import Simulation
from rccpsim.metrics import write_metrics
from rccpsim.provisioner import dump_traces

scenario = reference_scenario()
auditor = Auditor()
sim = Simulation(scenario, policy="era", seed=2, observer=auditor)
record = sim.run()
print(write_metrics([record]))

# %%
# a RAL miss goes out to every owner; a hit is served from leased resources
for trace in sim.provisioner.traces[:3]:
    print(trace.trace_id, trace.kind, " ".join(trace.tags))

hits = [t for t in sim.provisioner.traces if t.tags[1:2] == ["RalHit"]]
if hits:
    print("first RAL hit:", " ".join(hits[0].tags))

# %%
text = dump_traces(sim.provisioner.traces)
print(text.splitlines()[0])
report = validate_dump(text)
print("trace classes:", report["counts"], "violations:", len(report["violations"]))
print("events audited:", auditor.events, "selections re-checked:", auditor.decisions_checked)
