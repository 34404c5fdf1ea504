#!/usr/bin/env python3
"""Style-estimation accuracy sweep.

Runs the estimation testbench across a grid of true style weights and
prints the final estimate, error, and update count for each.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from evomerge.config import load_scenario
from evomerge.runner import run_estimation_bench

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=str(ROOT / "scenarios" / "estimation.cfg"))
    parser.add_argument("--grid", type=int, default=19, help="number of grid points in (0, 1)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    cfg = load_scenario(args.scenario)
    print(f"{'true':>6s} {'estimate':>9s} {'error':>7s} {'updates':>8s} {'contained':>10s}")
    worst = 0.0
    for i in range(1, args.grid + 1):
        omega = i / (args.grid + 1)
        result = run_estimation_bench(cfg, true_omega=omega, seed=args.seed)
        worst = max(worst, result.error)
        print(f"{omega:6.3f} {result.belief.omega_hat:9.4f} {result.error:7.4f} "
              f"{result.n_updates:8d} {str(result.contained):>10s}")
    print(f"\nworst error: {worst:.4f}")


if __name__ == "__main__":
    main()
