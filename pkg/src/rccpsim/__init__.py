"""Discrete-event simulator of cost- and performance-aware cloud resource provisioning."""

from .cost_model import CostWeights, cost_factor, link_communication_cost, resource_utilization_cost
from .domain import Cloudlet, NetworkLink, OwnedResource, ResourceSpec, VmInstance, spec_satisfies
from .engine import Simulation, run
from .metrics import MetricsRecord, parse_metrics, write_metrics
from .policies import POLICY_NAMES, baseline_allocate, make_policy
from .provisioner import NoResourceAvailable, Provisioner, ResourceOwner, select_offer
from .scenario import ScenarioConfig, ScenarioError, load_scenario, parse_scenario, reference_scenario
from .scoring import (ScoringParams, performance_factor, popularity_value, rank_candidates,
                      reliability)
from .vm_manager import VmManager, cloudlet_runtime
from .workload import WorkloadParams, generate_workload

__version__ = "0.1.0"
