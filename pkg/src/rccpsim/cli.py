"""Command line: ``rccpsim run | compare | validate``."""

from __future__ import annotations

import argparse
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor

from .engine import Simulation
from .metrics import write_metrics
from .policies import POLICY_NAMES
from .provisioner import dump_traces
from .scenario import ScenarioError, load_scenario

__all__ = ["main", "build_parser"]


class CliError(Exception):
    pass


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed out of unsigned 64-bit range: {v}")
    return v


def _policy(name: str) -> str:
    if name not in POLICY_NAMES:
        raise CliError(f"unknown policy {name!r}; valid names: {', '.join(POLICY_NAMES)}")
    return name


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rccpsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="one simulation; metrics appended to --out")
    r.add_argument("--scenario", required=True)
    r.add_argument("--policy", required=True)
    r.add_argument("--seed", type=_u64, required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--trace", help="write the protocol trace (JSON lines) here")

    c = sub.add_parser("compare", help="seeded runs per policy; --out overwritten")
    c.add_argument("--scenario", required=True)
    c.add_argument("--policies", required=True, help="comma-separated policy names")
    c.add_argument("--runs", type=int, required=True)
    c.add_argument("--seed", type=_u64, required=True, help="run i uses seed + i")
    c.add_argument("--out", required=True)
    c.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    v = sub.add_parser("validate", help="parse and validate a scenario file")
    v.add_argument("--scenario", required=True)
    return p


def _load(path):
    try:
        return load_scenario(path)
    except OSError as e:
        raise CliError(f"cannot read scenario {path!r}: {e.strerror}") from None
    except ScenarioError as e:
        raise CliError(f"{path}: {e}") from None


def _one(args):
    scenario, policy, seed = args
    return Simulation(scenario, policy, seed).run()


def cmd_run(a) -> int:
    policy = _policy(a.policy)
    scenario = _load(a.scenario)
    sim = Simulation(scenario, policy, a.seed)
    rec = sim.run()
    fresh = not os.path.exists(a.out) or os.path.getsize(a.out) == 0
    try:
        with open(a.out, "a", encoding="utf-8", newline="") as fh:
            fh.write(write_metrics([rec], header=fresh))
        if a.trace:
            with open(a.trace, "w", encoding="utf-8") as fh:
                fh.write(dump_traces(sim.provisioner.traces))
    except OSError as e:
        raise CliError(f"cannot write output: {e}") from None
    return 0


def cmd_compare(a) -> int:
    policies = [_policy(p.strip()) for p in a.policies.split(",") if p.strip()]
    if not policies:
        raise CliError("no policies given")
    if a.runs < 1:
        raise CliError("--runs must be >= 1")
    if a.seed + a.runs - 1 >= 2**64:
        raise CliError("seed + runs exceeds the unsigned 64-bit range")
    scenario = _load(a.scenario)
    jobs = [(scenario, p, a.seed + i) for p in policies for i in range(a.runs)]
    if a.jobs > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            records = list(ex.map(_one, jobs, chunksize=8))
    else:
        records = [_one(j) for j in jobs]
    try:
        with open(a.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(write_metrics(records))
    except OSError as e:
        raise CliError(f"cannot write output: {e}") from None
    for p in policies:
        rs = [r for r in records if r.policy == p]
        print(f"{p}: runs={len(rs)} mean_total_cost={statistics.fmean(r.total_cost for r in rs):.6f} "
              f"mean_makespan_s={statistics.fmean(r.makespan_s for r in rs):.6f}")
    return 0


def cmd_validate(a) -> int:
    cfg = _load(a.scenario)
    n = sum(len(o.resources) for o in cfg.owners)
    print(f"ok: {len(cfg.owners)} owners, {n} resources, {cfg.workload.num_cloudlets} cloudlets")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "compare": cmd_compare, "validate": cmd_validate}[args.command]
    try:
        return handler(args)
    except CliError as e:
        print(f"rccpsim: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
