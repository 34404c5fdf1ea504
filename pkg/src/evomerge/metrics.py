"""Trajectory quality metrics, batch execution, and trace persistence.

Jerk (first differences of recorded acceleration), the terminal speed of the
platoon's probe vehicle, the collision flag, and capped time-to-collision
samples together quantify how much the merge disturbs main-road traffic.
Batches aggregate seeded runs deterministically in seed order regardless of
execution interleaving.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .baselines import Policy
from .runner import SimConfig, SimTrace, StepRecord, run_scenario
from .traffic import Lane

AV_ID = "AV"

#: TTC samples are capped here; uncapped samples from barely-closing pairs
#: would otherwise dominate every mean.
TTC_CAP = 10.0

#: Id of the platoon vehicle whose terminal speed probes downstream impact.
TERMINAL_PROBE_ID = "MV5"


@dataclass(frozen=True, slots=True)
class MetricsReport:
    mean_jerk: float
    max_jerk: float
    terminal_speed_mv5: float
    collided: bool
    mean_ttc: float
    ttc_undefined_dominant: bool  # no closing sample ever occurred
    seed: int

    def __post_init__(self) -> None:
        if self.mean_jerk > self.max_jerk + 1e-12:
            raise ValueError("mean jerk cannot exceed max jerk")
        for name in ("mean_jerk", "max_jerk", "terminal_speed_mv5", "mean_ttc"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"metric {name} is not finite")
        if not 0.0 < self.mean_ttc <= TTC_CAP:
            raise ValueError(f"mean_ttc outside (0, {TTC_CAP}]: {self.mean_ttc}")


def compute_metrics(trace: SimTrace, ttc_cap: float = TTC_CAP) -> MetricsReport:
    """Metrics of one completed trace.

    Jerk pools first differences of recorded acceleration over all main-road
    vehicles.  TTC is sampled at every step for every main-road vehicle
    behind the merging vehicle once they share the lane, whenever the
    follower is closing; samples are capped.  Traces shorter than two steps
    per vehicle cannot be differenced and are rejected.
    """
    by_vid: dict[str, list[StepRecord]] = {}
    for rec in trace.steps:
        by_vid.setdefault(rec.vid, []).append(rec)
    mv_ids = [vid for vid in by_vid if vid != AV_ID]
    if not mv_ids:
        raise ValueError("trace contains no main-road vehicles")

    jerks: list[float] = []
    for vid in mv_ids:
        recs = by_vid[vid]
        if len(recs) < 2:
            raise ValueError(f"trace for {vid} has fewer than 2 steps; cannot difference")
        for prev, cur in zip(recs, recs[1:]):
            jerks.append(abs(cur.a - prev.a) / trace.dt)

    probe = TERMINAL_PROBE_ID if TERMINAL_PROBE_ID in by_vid else mv_ids[-1]
    terminal_speed = by_vid[probe][-1].v

    ttc_samples: list[float] = []
    av_recs = {r.t: r for r in by_vid.get(AV_ID, [])}
    for vid in mv_ids:
        for rec in by_vid[vid]:
            av = av_recs.get(rec.t)
            if av is None or av.lane is not Lane.MAIN or rec.lane is not av.lane:
                continue
            if rec.s >= av.s:
                continue
            closing = rec.v - av.v
            if closing <= 0.0:
                continue
            gap = (av.s - rec.s) - 5.0  # bumper to bumper at nominal length
            if gap <= 0.0:
                continue
            ttc_samples.append(min(gap / closing, ttc_cap))

    undefined = not ttc_samples
    mean_ttc = ttc_cap if undefined else sum(ttc_samples) / len(ttc_samples)

    return MetricsReport(
        mean_jerk=sum(jerks) / len(jerks),
        max_jerk=max(jerks),
        terminal_speed_mv5=terminal_speed,
        collided=bool(trace.collisions),
        mean_ttc=mean_ttc,
        ttc_undefined_dominant=undefined,
        seed=trace.seed,
    )


@dataclass(frozen=True, slots=True)
class BatchSummary:
    n_runs: int
    policy: Policy
    base_seed: int
    collision_rate: float  # percent of runs with a collision
    mean_jerk_mean: float
    mean_jerk_std: float
    max_jerk_mean: float
    max_jerk_std: float
    terminal_speed_mean: float
    terminal_speed_std: float
    mean_ttc_mean: float
    mean_ttc_std: float
    failed_seeds: tuple[int, ...]
    reports: tuple[MetricsReport, ...]


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def _one_run(args: tuple[SimConfig, int, Policy]) -> tuple[int, Optional[MetricsReport], Optional[str]]:
    cfg, seed, policy = args
    try:
        trace = run_scenario(replace(cfg, seed=seed), policy)
        return seed, compute_metrics(trace), None
    except Exception as exc:  # recorded as a failed run, never a crash
        return seed, None, f"{type(exc).__name__}: {exc}"


def run_batch(
    cfg: SimConfig,
    n: int,
    base_seed: int,
    policy: Policy = Policy.EGT,
    jobs: int = 1,
) -> BatchSummary:
    """Run seeds base_seed..base_seed+n-1 and aggregate in seed order."""
    if n < 1:
        raise ValueError("batch needs at least one run")
    tasks = [(cfg, base_seed + i, policy) for i in range(n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_one_run, tasks))
    else:
        raw = [_one_run(task) for task in tasks]
    raw.sort(key=lambda item: item[0])

    reports = [rep for _, rep, _ in raw if rep is not None]
    failed = tuple(seed for seed, rep, _ in raw if rep is None)
    if not reports:
        raise RuntimeError("every run in the batch failed")

    collisions = sum(1 for r in reports if r.collided)
    mj = _mean_std([r.mean_jerk for r in reports])
    xj = _mean_std([r.max_jerk for r in reports])
    ts = _mean_std([r.terminal_speed_mv5 for r in reports])
    tt = _mean_std([r.mean_ttc for r in reports])
    return BatchSummary(
        n_runs=n,
        policy=policy,
        base_seed=base_seed,
        collision_rate=100.0 * collisions / len(reports),
        mean_jerk_mean=mj[0], mean_jerk_std=mj[1],
        max_jerk_mean=xj[0], max_jerk_std=xj[1],
        terminal_speed_mean=ts[0], terminal_speed_std=ts[1],
        mean_ttc_mean=tt[0], mean_ttc_std=tt[1],
        failed_seeds=failed,
        reports=tuple(reports),
    )


# --------------------------------------------------------------------------
# Serialization: 9 significant digits everywhere so repeated runs are
# byte-identical.


def fmt(x: float) -> str:
    return f"{x:.9g}"


TRACE_HEADER = "t,id,lane,s,v,a,decision,p_star,q_star,k_l,k_u,omega_hat"


def trace_csv(trace: SimTrace) -> str:
    """Render one run as CSV; decision fields fill only the AV's decision rows."""
    decisions = {d.t: d for d in trace.decisions}
    lines = [TRACE_HEADER]
    for rec in trace.steps:
        decision_cols = ["", "", "", "", "", ""]
        if rec.vid == AV_ID and rec.t in decisions:
            d = decisions[rec.t]
            decision_cols = [
                f"{d.maneuver.value}[{d.opponent or ''}]",
                fmt(d.p_star) if d.p_star is not None else "",
                fmt(d.q_star) if d.q_star is not None else "",
                fmt(d.k_l) if d.k_l is not None else "",
                fmt(d.k_u) if d.k_u is not None else "",
                fmt(d.omega_hat) if d.omega_hat is not None else "",
            ]
        lines.append(",".join([
            fmt(rec.t), rec.vid, rec.lane.value, fmt(rec.s), fmt(rec.v), fmt(rec.a),
            *decision_cols,
        ]))
    return "\n".join(lines) + "\n"


def write_trace(trace: SimTrace, path: str | Path) -> None:
    Path(path).write_text(trace_csv(trace))


def run_report_text(report: MetricsReport, trace: SimTrace) -> str:
    lines = [
        f"seed={report.seed}",
        f"policy={trace.policy.value}",
        f"mean_jerk={fmt(report.mean_jerk)}",
        f"max_jerk={fmt(report.max_jerk)}",
        f"terminal_speed_mv5={fmt(report.terminal_speed_mv5)}",
        f"collided={'true' if report.collided else 'false'}",
        f"mean_ttc={fmt(report.mean_ttc)}",
        f"ttc_undefined_dominant={'true' if report.ttc_undefined_dominant else 'false'}",
        f"final_order={'>'.join(trace.final_order)}",
        f"av_front={trace.av_front or ''}",
        f"av_rear={trace.av_rear or ''}",
        f"lane_change_time={fmt(trace.lane_change_time) if trace.lane_change_time is not None else ''}",
    ]
    return "\n".join(lines) + "\n"


def batch_summary_text(summary: BatchSummary) -> str:
    lines = [
        f"n_runs={summary.n_runs}",
        f"policy={summary.policy.value}",
        f"base_seed={summary.base_seed}",
        f"collision_rate={fmt(summary.collision_rate)}",
        f"mean_jerk_mean={fmt(summary.mean_jerk_mean)}",
        f"mean_jerk_std={fmt(summary.mean_jerk_std)}",
        f"max_jerk_mean={fmt(summary.max_jerk_mean)}",
        f"max_jerk_std={fmt(summary.max_jerk_std)}",
        f"terminal_speed_mean={fmt(summary.terminal_speed_mean)}",
        f"terminal_speed_std={fmt(summary.terminal_speed_std)}",
        f"mean_ttc_mean={fmt(summary.mean_ttc_mean)}",
        f"mean_ttc_std={fmt(summary.mean_ttc_std)}",
        f"failed_seeds={','.join(str(s) for s in summary.failed_seeds)}",
    ]
    return "\n".join(lines) + "\n"
