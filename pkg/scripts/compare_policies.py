#!/usr/bin/env python3
"""Policy comparison table on the first scenario.

Runs the seeded batch under the evolutionary, Nash, and Stackelberg
policies and prints the metric summary side by side.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from evomerge.baselines import Policy
from evomerge.config import load_scenario
from evomerge.metrics import run_batch

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--base-seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--scenario", default=str(ROOT / "scenarios" / "scenario1.cfg"))
    args = parser.parse_args()

    cfg = load_scenario(args.scenario)
    summaries = {
        policy: run_batch(cfg, args.runs, args.base_seed, policy, jobs=args.jobs)
        for policy in (Policy.EGT, Policy.NASH, Policy.STACKELBERG)
    }

    rows = [
        ("mean jerk (m/s^3)", lambda s: f"{s.mean_jerk_mean:.3f}"),
        ("max jerk (m/s^3)", lambda s: f"{max(r.max_jerk for r in s.reports):.3f}"),
        ("terminal speed (m/s)", lambda s: f"{s.terminal_speed_mean:.2f}"),
        ("collision rate (%)", lambda s: f"{s.collision_rate:.1f}"),
        ("mean TTC (s)", lambda s: f"{s.mean_ttc_mean:.2f}"),
    ]
    names = [p.value for p in summaries]
    print(f"{'metric':24s} " + " ".join(f"{n:>12s}" for n in names))
    for label, fmt in rows:
        cells = [fmt(summaries[p]) for p in summaries]
        print(f"{label:24s} " + " ".join(f"{c:>12s}" for c in cells))


if __name__ == "__main__":
    main()
