"""Scenario orchestration: per-period games, control, lane change, tracing.

One simulation advances in fixed kinematic steps.  At every decision period
the merging vehicle locates the main-road vehicle directly behind its
claimed slot, folds the previous period's prediction and the observed speed
change into that driver's style belief, rebuilds the payoff matrix at the
belief midpoint, solves for the equilibrium, and maps it to a maneuver:
merge ahead of the opponent, or yield and shift the claim one slot back.
Between periods the maneuver is tracked by a constant-acceleration arrival
law re-evaluated every step; main-road vehicles follow the IDM, treating
the merging vehicle as a virtual leader while it games them.  The lane
change itself is a single-period lane reassignment in the convergence area
guarded by a bumper-gap feasibility check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .baselines import Policy, merge_profile, select_nash, stackelberg
from .egt import EquilibriumReport, StrategyState, solve_ess
from .estimation import StyleBelief, observed_reaction, update_belief
from .payoff import (
    ARRIVAL_TIME_FLOOR,
    AgentView,
    DrivingStyle,
    GameContext,
    build_matrix,
)
from .traffic import (
    CONVERGENCE_AREA,
    EMERGENCY_DECEL,
    FREE_ROAD_GAP,
    IDMParams,
    Lane,
    MERGE_POINT_S,
    VehicleState,
    bumper_gap,
    check_collision,
    headway_from_style,
    idm_accel,
    idm_params_for_style,
    projected_arrival,
    step_kinematics,
    style_from_headway,
)

AV_ID = "AV"

# Merge-control authority limits, m/s^2.
CONTROL_MIN = -8.0
CONTROL_MAX = 3.0

#: Headway samples are truncated into this range, seconds.
HEADWAY_RANGE = (0.5, 3.5)

#: Targets below this demand immediate braking and bypass the comfort slew.
EMERGENCY_TARGET = -4.0


class ManeuverKind(Enum):
    MERGE_AHEAD = "merge_ahead"
    YIELD_SHIFT = "yield_shift"


@dataclass(frozen=True, slots=True)
class Maneuver:
    """Decision outcome; target is the opponent id, None for the platoon tail."""

    kind: ManeuverKind
    target: Optional[str] = None
    committed: bool = False


def decide(report: EquilibriumReport, target: Optional[str] = None) -> Maneuver:
    """Map an equilibrium report to a maneuver.

    Merge ahead only on a unique stable point with p* < q* (the merging
    vehicle pushes, the opponent yields).  Everything else, including the
    both-push point, no stable point, and multiple stable points, falls back
    to yielding: the conservative default preserves the safety claims.
    """
    if report.has_unique_ess and report.ess is not None:
        ess = report.ess
        if ess.p < ess.q:
            return Maneuver(ManeuverKind.MERGE_AHEAD, target=target)
    return Maneuver(ManeuverKind.YIELD_SHIFT, target=target)


def merge_control(ctx: GameContext, maneuver: Maneuver) -> float:
    """Constant-acceleration command tracking the maneuver's arrival target.

    Merging ahead schedules arrival one headway margin before the opponent's
    projected arrival, yielding one margin after it; the go-branch time is
    floored and the command clamped to the control authority.
    """
    base = ctx.mv.dist_to_merge / ctx.mv.speed
    if maneuver.kind is ManeuverKind.MERGE_AHEAD:
        t = max(base - ctx.headway_t, ARRIVAL_TIME_FLOOR)
    else:
        t = base + ctx.headway_t
    u = 2.0 * (ctx.av.dist_to_merge - ctx.av.speed * t) / (t * t)
    return min(max(u, CONTROL_MIN), CONTROL_MAX)


def execute_lane_change(
    av: VehicleState,
    front: Optional[VehicleState],
    rear: Optional[VehicleState],
    min_gap: float = 2.0,
) -> tuple[VehicleState, bool]:
    """Reassign the merging vehicle to the main lane if the slot fits.

    Both bumper gaps must be at least ``min_gap``; a missing neighbor leaves
    that side unconstrained.  On an infeasible slot the state is returned
    unchanged with ok=False, signaling a re-queue.
    """
    if front is not None and bumper_gap(av, front) < min_gap:
        return av, False
    if rear is not None and bumper_gap(rear, av) < min_gap:
        return av, False
    return replace(av, lane=Lane.MAIN), True


# --------------------------------------------------------------------------
# Scenario configuration


@dataclass(frozen=True, slots=True)
class HeadwaySpec:
    """Fixed headway, or one truncated-normal draw per run."""

    kind: str  # "fixed" | "normal"
    value: float = 0.0
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "normal"):
            raise ValueError(f"unknown headway kind {self.kind!r}")

    def sample(self, rng: np.random.Generator) -> float:
        if self.kind == "fixed":
            return self.value
        lo, hi = HEADWAY_RANGE
        for _ in range(1000):
            draw = rng.normal(self.value, self.sigma)
            if lo <= draw <= hi:
                return float(draw)
        return float(min(max(self.value, lo), hi))


@dataclass(frozen=True, slots=True)
class VehicleSpec:
    vid: str
    dist_to_merge: float
    speed: float
    headway: HeadwaySpec


@dataclass(frozen=True, slots=True)
class AvSpec:
    dist_to_merge: float = 100.0
    speed: float = 10.0
    omega: float = 0.5


@dataclass(frozen=True, slots=True)
class SimConfig:
    vehicles: tuple[VehicleSpec, ...]
    av: AvSpec = AvSpec()
    duration: float = 10.0
    dt: float = 0.1
    decision_period: float = 1.0
    horizon: int = 5
    seed: int = 0
    headway_t: float = 2.0       # right-of-way margin in the payoff and control laws
    flow_speed: float = 10.0     # nominal main-road speed anchoring desired speeds
    speed_slack: float = 6.0     # extra desired speed for fully aggressive styles
    reaction_deadband: float = 0.18  # speed change read as a deliberate reaction, m/s
    jerk_limit: float = 1.2      # main-road comfort slew on acceleration, m/s^3
    probe_accel: float = 1.2     # proactive test acceleration in the opening game, m/s^2
    probe_periods: int = 3       # decision periods the probe lasts

    def __post_init__(self) -> None:
        if not self.vehicles:
            raise ValueError("scenario needs at least one main-road vehicle")
        if self.dt <= 0.0 or self.duration <= 0.0 or self.decision_period <= 0.0:
            raise ValueError("duration, dt and decision_period must be positive")
        ratio = self.decision_period / self.dt
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("dt must divide decision_period")
        if self.decision_period * self.horizon > self.duration + 1e-9:
            raise ValueError("decision_period * horizon must not exceed duration")
        ids = [v.vid for v in self.vehicles]
        if len(set(ids)) != len(ids) or AV_ID in ids:
            raise ValueError("vehicle ids must be unique and must not shadow the AV")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def steps_per_period(self) -> int:
        return int(round(self.decision_period / self.dt))


# --------------------------------------------------------------------------
# Trace records


@dataclass(frozen=True, slots=True)
class StepRecord:
    t: float
    vid: str
    lane: Lane
    s: float
    v: float
    a: float


@dataclass(frozen=True, slots=True)
class DecisionRecord:
    t: float
    opponent: Optional[str]
    p_star: Optional[float]
    q_star: Optional[float]
    maneuver: ManeuverKind
    k_l: Optional[float]
    k_u: Optional[float]
    omega_hat: Optional[float]


@dataclass(frozen=True, slots=True)
class CollisionEvent:
    t: float
    first: str
    second: str


@dataclass(slots=True)
class SimTrace:
    """Complete, deterministic record of one run."""

    seed: int
    policy: Policy
    dt: float
    duration: float
    steps: list[StepRecord] = field(default_factory=list)
    decisions: list[DecisionRecord] = field(default_factory=list)
    collisions: list[CollisionEvent] = field(default_factory=list)
    final_order: tuple[str, ...] = ()
    av_front: Optional[str] = None
    av_rear: Optional[str] = None
    lane_change_time: Optional[float] = None
    true_styles: dict[str, float] = field(default_factory=dict)
    headways: dict[str, float] = field(default_factory=dict)

    def records_for(self, vid: str) -> list[StepRecord]:
        return [r for r in self.steps if r.vid == vid]


@dataclass(slots=True)
class _Prediction:
    opponent: str
    ctx: GameContext
    ess: StrategyState
    v_opponent: float


class _Sim:
    """Mutable loop state for one scenario run."""

    def __init__(self, cfg: SimConfig, policy: Policy):
        self.cfg = cfg
        self.policy = policy
        rng = np.random.default_rng(cfg.seed)

        self.mv_ids: list[str] = []
        self.states: dict[str, VehicleState] = {}
        self.idm: dict[str, IDMParams] = {}
        self.true_style: dict[str, float] = {}
        self.headway: dict[str, float] = {}
        for spec in cfg.vehicles:
            headway = spec.headway.sample(rng)
            omega = style_from_headway(headway)
            self.mv_ids.append(spec.vid)
            self.states[spec.vid] = VehicleState(
                vid=spec.vid, lane=Lane.MAIN,
                s=MERGE_POINT_S - spec.dist_to_merge, v=spec.speed,
            )
            self.idm[spec.vid] = idm_params_for_style(omega, headway, cfg.flow_speed, cfg.speed_slack)
            self.true_style[spec.vid] = omega
            self.headway[spec.vid] = headway

        self.states[AV_ID] = VehicleState(
            vid=AV_ID, lane=Lane.RAMP,
            s=MERGE_POINT_S - cfg.av.dist_to_merge, v=cfg.av.speed,
        )
        self.av_style = DrivingStyle(omega=cfg.av.omega, headway=headway_from_style(cfg.av.omega))
        self.av_idm = idm_params_for_style(cfg.av.omega, self.av_style.headway, cfg.flow_speed, cfg.speed_slack)

        self.beliefs: dict[str, StyleBelief] = {vid: StyleBelief() for vid in self.mv_ids}
        self.pending: Optional[_Prediction] = None
        self.maneuver = Maneuver(ManeuverKind.YIELD_SHIFT, target=None)
        self.committed = False
        self.front_id: Optional[str] = None
        self.prev_accel: dict[str, float] = {}
        self.current_opponent: Optional[str] = None
        self.game_age = 0  # decision periods spent on the current opponent

        # Opponent progression: fixed arrival order at t=0, advanced on yields.
        order = sorted(
            self.mv_ids,
            key=lambda vid: (projected_arrival(self.states[vid]), vid),
        )
        av_arrival = projected_arrival(self.states[AV_ID])
        self.opponent_order = order
        self.next_opponent = 0
        while (self.next_opponent < len(order)
               and projected_arrival(self.states[order[self.next_opponent]]) <= av_arrival):
            self.next_opponent += 1
        self.first_opponent = self.next_opponent

    # -- helpers -----------------------------------------------------------

    def opponent(self) -> Optional[str]:
        if self.next_opponent < len(self.opponent_order):
            return self.opponent_order[self.next_opponent]
        return None

    def game_view(self, vid: str) -> AgentView:
        st = self.states[vid]
        return AgentView(dist_to_merge=max(st.dist_to_merge, 0.0), speed=max(st.v, 0.1))

    def context_for(self, opponent: str, omega_hat: float) -> GameContext:
        eps = 1e-9
        omega_hat = min(max(omega_hat, eps), 1.0 - eps)
        return GameContext(
            av=self.game_view(AV_ID),
            mv=self.game_view(opponent),
            av_style=self.av_style,
            mv_style=DrivingStyle(omega=omega_hat, headway=self.headway[opponent]),
            headway_t=self.cfg.headway_t,
        )

    def main_ahead_of(self, s: float) -> Optional[VehicleState]:
        """Nearest main-lane vehicle strictly ahead of position s."""
        best = None
        for vid in self.mv_ids:
            st = self.states[vid]
            if st.s > s and (best is None or st.s < best.s):
                best = st
        return best

    def main_tail(self) -> Optional[VehicleState]:
        tail = None
        for vid in self.mv_ids:
            st = self.states[vid]
            if tail is None or st.s < tail.s:
                tail = st
        return tail

    # -- decision period ---------------------------------------------------

    def decision_step(self, t: float, trace: SimTrace) -> None:
        opp = self.opponent()

        if opp is None:
            # Yielded past the whole platoon: claim the tail slot.
            self.pending = None
            self.maneuver = Maneuver(ManeuverKind.MERGE_AHEAD, target=None)
            trace.decisions.append(DecisionRecord(
                t=t, opponent=None, p_star=None, q_star=None,
                maneuver=self.maneuver.kind, k_l=None, k_u=None, omega_hat=None,
            ))
            self.try_lane_change(t, trace)
            return

        if opp == self.current_opponent:
            self.game_age += 1
        else:
            self.current_opponent = opp
            self.game_age = 0
        if self.pending is not None and self.pending.opponent == opp:
            reaction = observed_reaction(
                self.states[opp].v, self.pending.v_opponent, self.cfg.reaction_deadband
            )
            self.beliefs[opp] = update_belief(
                self.beliefs[opp], self.pending.ess, reaction, self.pending.ctx
            )
        self.pending = None

        belief = self.beliefs[opp]
        ctx = self.context_for(opp, belief.omega_hat)
        matrix = build_matrix(ctx)
        report = solve_ess(matrix)

        if self.policy is Policy.EGT:
            self.maneuver = decide(report, target=opp)
        else:
            profile = select_nash(matrix) if self.policy is Policy.NASH else stackelberg(matrix)
            kind = ManeuverKind.MERGE_AHEAD if merge_profile(profile) else ManeuverKind.YIELD_SHIFT
            self.maneuver = Maneuver(kind, target=opp)

        if report.ess is not None:
            self.pending = _Prediction(
                opponent=opp, ctx=ctx, ess=report.ess, v_opponent=self.states[opp].v
            )

        trace.decisions.append(DecisionRecord(
            t=t, opponent=opp,
            p_star=report.ess.p if report.ess else None,
            q_star=report.ess.q if report.ess else None,
            maneuver=self.maneuver.kind,
            k_l=belief.k_l, k_u=belief.k_u, omega_hat=belief.omega_hat,
        ))

        if self.maneuver.kind is ManeuverKind.YIELD_SHIFT:
            self.advance_past()
        else:
            self.try_lane_change(t, trace)

    def advance_past(self) -> None:
        self.next_opponent += 1
        self.pending = None

    def try_lane_change(self, t: float, trace: SimTrace) -> None:
        av = self.states[AV_ID]
        if av.s < CONVERGENCE_AREA[0] or self.maneuver.kind is not ManeuverKind.MERGE_AHEAD:
            return
        front = self.main_ahead_of(av.s)
        rear = self.states[self.maneuver.target] if self.maneuver.target else None
        moved, ok = execute_lane_change(av, front, rear, min_gap=self.av_idm.s0)
        if ok:
            self.states[AV_ID] = moved
            self.committed = True
            self.maneuver = replace(self.maneuver, committed=True)
            self.front_id = front.vid if front is not None else None
            self.pending = None
            trace.lane_change_time = t
        elif self.maneuver.target is not None:
            # Infeasible slot at the boundary: forced yield, re-queue.
            self.maneuver = Maneuver(ManeuverKind.YIELD_SHIFT, target=self.maneuver.target)
            self.advance_past()

    # -- per-step controls -------------------------------------------------

    def av_accel(self) -> float:
        av = self.states[AV_ID]
        if self.committed:
            front = self.states[self.front_id] if self.front_id else None
            if front is None:
                return idm_accel(self.av_idm, av.v, FREE_ROAD_GAP, 0.0)
            gap = bumper_gap(av, front)
            if gap <= 0.0:
                return -EMERGENCY_DECEL
            return idm_accel(self.av_idm, av.v, gap, av.v - front.v)
        if self.maneuver.target is None:
            if self.maneuver.kind is ManeuverKind.MERGE_AHEAD:
                # Tail slot claimed: settle in behind the last platoon vehicle.
                tail = self.main_tail()
                if tail is None:
                    return 0.0
                if av.s < tail.s:
                    gap = bumper_gap(av, tail)
                    if gap <= 0.0:
                        return -EMERGENCY_DECEL
                    return idm_accel(self.av_idm, av.v, gap, av.v - tail.v)
                ctx = self.context_for(tail.vid, self.beliefs[tail.vid].omega_hat)
                return merge_control(ctx, Maneuver(ManeuverKind.YIELD_SHIFT, target=tail.vid))
            return 0.0
        ctx = self.context_for(self.maneuver.target, self.beliefs[self.maneuver.target].omega_hat)
        u = merge_control(ctx, self.maneuver)
        if (self.maneuver.kind is ManeuverKind.MERGE_AHEAD
                and self.next_opponent == self.first_opponent
                and self.game_age < self.cfg.probe_periods):
            # Proactive acceleration test against the adjacent driver: open
            # the gap so a chase becomes visible before arrival tracking
            # takes over.  Later games skip the probe; the slot between two
            # platoon vehicles is too tight to accelerate into blindly.
            u = max(u, self.cfg.probe_accel)
        return u

    def mv_accel(self, vid: str) -> float:
        st = self.states[vid]
        leader = self.main_ahead_of(st.s)
        av = self.states[AV_ID]
        if av.lane is Lane.MAIN and av.s > st.s and (leader is None or av.s < leader.s):
            leader = av

        if leader is None:
            a = idm_accel(self.idm[vid], st.v, FREE_ROAD_GAP, 0.0)
        else:
            gap = bumper_gap(st, leader)
            if gap <= 0.0:
                return -EMERGENCY_DECEL
            a = idm_accel(self.idm[vid], st.v, gap, st.v - leader.v)

        # Virtual leader: the merging vehicle constrains the driver it is
        # actively gaming while it is still on the ramp and ahead.
        game_active = (not self.committed and self.opponent() == vid)
        if game_active and av.lane is Lane.RAMP and av.s > st.s:
            gap = bumper_gap(st, av)
            if gap <= 0.5:
                gap = 0.5
            a = min(a, idm_accel(self.idm[vid], st.v, gap, st.v - av.v))
        return a

    def slewed(self, vid: str, target: float) -> float:
        prev = self.prev_accel.get(vid)
        if prev is None:
            self.prev_accel[vid] = target
            return target
        span = self.cfg.jerk_limit * self.cfg.dt
        a = min(max(target, prev - span), prev + span)
        if target <= EMERGENCY_TARGET and target < a:
            a = target
        self.prev_accel[vid] = a
        return a


def run_scenario(cfg: SimConfig, policy: Policy = Policy.EGT) -> SimTrace:
    """Run one seeded scenario to completion and return its trace."""
    sim = _Sim(cfg, policy)
    trace = SimTrace(seed=cfg.seed, policy=policy, dt=cfg.dt, duration=cfg.duration,
                     true_styles=dict(sim.true_style), headways=dict(sim.headway))

    for k in range(cfg.n_steps):
        t = round(k * cfg.dt, 9)
        if k % cfg.steps_per_period == 0 and not sim.committed:
            sim.decision_step(t, trace)

        accels: dict[str, float] = {AV_ID: sim.av_accel()}
        for vid in sim.mv_ids:
            accels[vid] = sim.slewed(vid, sim.mv_accel(vid))

        for vid in [AV_ID, *sim.mv_ids]:
            st = sim.states[vid]
            trace.steps.append(StepRecord(t=t, vid=vid, lane=st.lane, s=st.s, v=st.v, a=accels[vid]))

        for vid in [AV_ID, *sim.mv_ids]:
            sim.states[vid] = step_kinematics(sim.states[vid], accels[vid], cfg.dt)

        for first, second in check_collision(list(sim.states.values())):
            trace.collisions.append(CollisionEvent(t=round((k + 1) * cfg.dt, 9), first=first, second=second))

    _finalize(sim, trace)
    return trace


def _finalize(sim: _Sim, trace: SimTrace) -> None:
    """Final merge position: physical order if merged, projected slot otherwise."""
    av = sim.states[AV_ID]
    mains = sorted((sim.states[vid] for vid in sim.mv_ids), key=lambda s: -s.s)
    if sim.committed:
        order = sorted([av, *mains], key=lambda s: -s.s)
        ids = [s.vid for s in order]
    else:
        ids = []
        placed = False
        for st in mains:  # front to back
            if not placed and sim.opponent() == st.vid:
                ids.append(AV_ID)
                placed = True
            ids.append(st.vid)
        if not placed:
            ids.append(AV_ID)
    trace.final_order = tuple(ids)
    idx = ids.index(AV_ID)
    trace.av_front = ids[idx - 1] if idx > 0 else None
    trace.av_rear = ids[idx + 1] if idx + 1 < len(ids) else None


# --------------------------------------------------------------------------
# Style-estimation testbench


@dataclass(frozen=True, slots=True)
class EstimationRound:
    t: float
    k_l: float
    k_u: float
    omega_hat: float
    predicted_q: Optional[float]
    accelerated: bool
    updated: bool


@dataclass(slots=True)
class EstimationResult:
    true_omega: float
    rounds: list[EstimationRound]
    belief: StyleBelief
    n_updates: int
    contained: bool  # true style never left the belief interval

    @property
    def error(self) -> float:
        return abs(self.belief.omega_hat - self.true_omega)


#: Crisp longitudinal actions of the synthetic truthful driver, m/s^2.
BENCH_PUSH_ACCEL = 0.6
BENCH_YIELD_DECEL = -0.6

#: Probe schedule: merging-vehicle arrival times walked from far to near,
#: seconds.  Across this range the equilibrium's style boundary sweeps the
#: whole admissible style interval for merge-scale geometries.
BENCH_TAU_FAR = 26.0
BENCH_TAU_NEAR = 6.0
BENCH_TAU_STEP = 0.25


def run_estimation_bench(
    cfg: SimConfig,
    true_omega: float,
    seed: Optional[int] = None,
    tau_far: float = BENCH_TAU_FAR,
    tau_near: float = BENCH_TAU_NEAR,
    tau_step: float = BENCH_TAU_STEP,
) -> EstimationResult:
    """Estimate a synthetic truthful driver's style through repeated probes.

    Each interaction is a short encounter with the same hidden-style driver
    at one point of an approach schedule: the merging vehicle arrives
    ``tau`` seconds from the merge point, the driver behind it at the
    scenario's configured offset.  The driver plays the equilibrium action
    of its own true style for one decision period (a visible push or a
    visible yield) and the resulting speed change is folded into the belief.
    Walking ``tau`` from far to near and back sweeps the equilibrium's style
    boundary up and then down across the whole interval, so both belief
    bounds get pinched against the true weight; updates remain strictly
    chronological.
    """
    if not 0.0 < true_omega < 1.0:
        raise ValueError("true_omega must lie in (0, 1)")
    if not tau_near < tau_far or tau_step <= 0.0:
        raise ValueError("need tau_near < tau_far and a positive tau_step")
    cfg = replace(cfg, seed=cfg.seed if seed is None else seed)
    sim = _Sim(cfg, Policy.EGT)
    opp = sim.opponent()
    if opp is None:
        raise ValueError("estimation bench needs an opponent behind the merging vehicle")
    offset = sim.states[opp].dist_to_merge - sim.states[AV_ID].dist_to_merge
    if offset <= 0.0:
        raise ValueError("the bench opponent must be behind the merging vehicle")
    v_av = sim.states[AV_ID].v
    v_mv = sim.states[opp].v

    belief = StyleBelief()
    rounds: list[EstimationRound] = []
    contained = True
    n_updates = 0

    leg = int(math.floor((tau_far - tau_near) / tau_step)) + 1
    schedule = [tau_far - k * tau_step for k in range(leg)]
    schedule += list(reversed(schedule[:-1]))
    for k, tau in enumerate(schedule):
        t = k * cfg.decision_period
        av = VehicleState(vid=AV_ID, lane=Lane.RAMP, s=MERGE_POINT_S - tau * v_av, v=v_av)
        mv = VehicleState(vid=opp, lane=Lane.MAIN, s=av.s - offset, v=v_mv)
        sim.states[AV_ID] = av
        sim.states[opp] = mv

        ctx = sim.context_for(opp, belief.omega_hat)
        report = solve_ess(build_matrix(ctx))
        if report.ess is None:
            rounds.append(EstimationRound(
                t=t, k_l=belief.k_l, k_u=belief.k_u, omega_hat=belief.omega_hat,
                predicted_q=None, accelerated=False, updated=False,
            ))
            continue

        # The driver's action comes from its own equilibrium at its true
        # style, evaluated on the identical kinematic context.
        truth = solve_ess(build_matrix(sim.context_for(opp, true_omega)))
        if truth.ess is not None and truth.ess.q == 0.0:
            u_mv = BENCH_PUSH_ACCEL
        elif truth.ess is not None and truth.ess.q == 1.0:
            u_mv = BENCH_YIELD_DECEL
        else:
            u_mv = 0.0
        u_av = merge_control(ctx, Maneuver(ManeuverKind.MERGE_AHEAD, target=opp))
        v_before = mv.v
        for _ in range(cfg.steps_per_period):
            av = step_kinematics(av, u_av, cfg.dt)
            mv = step_kinematics(mv, u_mv, cfg.dt)

        reaction = observed_reaction(mv.v, v_before, cfg.reaction_deadband)
        new_belief = update_belief(belief, report.ess, reaction, ctx)
        updated = new_belief != belief
        belief = new_belief
        if updated:
            n_updates += 1
        if not (belief.k_l - 1e-9 <= true_omega <= belief.k_u + 1e-9):
            contained = False

        rounds.append(EstimationRound(
            t=t, k_l=belief.k_l, k_u=belief.k_u, omega_hat=belief.omega_hat,
            predicted_q=report.ess.q, accelerated=reaction.accelerated, updated=updated,
        ))

    return EstimationResult(
        true_omega=true_omega, rounds=rounds, belief=belief,
        n_updates=n_updates, contained=contained,
    )
