#!/usr/bin/env python3
"""Reproduce the three merging case studies.

Sweeps seeds over each scenario file, prints the distribution of the
merging vehicle's final slot, and shows one illustrative run's decision
timeline per scenario.
"""

from __future__ import annotations

import argparse
from collections import Counter
from dataclasses import replace
from pathlib import Path

from evomerge.config import load_scenario
from evomerge.runner import run_scenario

ROOT = Path(__file__).resolve().parent.parent


def final_slot(trace) -> str:
    if trace.av_front is None:
        return "front of platoon"
    if trace.av_rear is None:
        return f"behind {trace.av_front} (rear)"
    return f"{trace.av_front} > AV > {trace.av_rear}"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=50)
    parser.add_argument("--scenario-dir", default=str(ROOT / "scenarios"))
    args = parser.parse_args()

    for name in ("scenario1", "scenario2", "scenario3"):
        cfg = load_scenario(Path(args.scenario_dir) / f"{name}.cfg")
        outcomes: Counter[str] = Counter()
        sample = None
        for seed in range(args.seeds):
            trace = run_scenario(replace(cfg, seed=seed))
            outcomes[final_slot(trace)] += 1
            if sample is None:
                sample = trace
        print(f"\n=== {name} ({args.seeds} seeds) ===")
        for slot, count in outcomes.most_common():
            print(f"  {count:3d}x  {slot}")
        print("  sample run (seed 0) decisions:")
        for d in sample.decisions:
            if d.opponent is None:
                continue
            est = f"omega_hat={d.omega_hat:.2f}" if d.omega_hat is not None else ""
            print(f"    t={d.t:4.1f}  vs {d.opponent}: {d.maneuver.value:12s} {est}")


if __name__ == "__main__":
    main()
