"""Multi-objective cell costs and game-matrix construction.

Each cell of the 2x2 game prices one joint semantic decision for a pair of
vehicles approaching the merge point.  A player's cost is

    J = omega * t  +  (1 - omega) * a_avg^2  +  w_s * |a_avg_self + a_avg_opp|

where t is the arrival time implied by the decision (yielding adds the safe
time headway T to the opponent's projected arrival, going subtracts it),
a_avg = 2 (d - v t) / t^2 is the constant acceleration required to arrive on
schedule, and the conflict weight w_s is 1 exactly on the two conflicting
decision pairs (both push, or both hang back).  Units are mixed by
construction (seconds, (m/s^2)^2, m/s^2); no normalization is applied.

The matrix stores fitness = -cost, since replicator dynamics select for the
higher value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .egt import PayoffMatrix

# Floor for the go-branch arrival time.  The raw expression d/v - T can reach
# zero or below when the opponent is nearly at the merge point; the floor
# keeps the acceleration term defined and prices such cells as undesirable
# through a huge comfort cost.
ARRIVAL_TIME_FLOOR = 0.5


class AvMove(Enum):
    YIELD = "yield"
    MERGE = "merge"


class MvMove(Enum):
    YIELD = "yield"
    ACCELERATE = "accelerate"


class Role(Enum):
    AV = "av"
    MV = "mv"


@dataclass(frozen=True, slots=True)
class StrategyPair:
    av_move: AvMove
    mv_move: MvMove


@dataclass(frozen=True, slots=True)
class DrivingStyle:
    """Style weight (larger = more aggressive) and preferred time headway."""

    omega: float
    headway: float

    def __post_init__(self) -> None:
        if not 0.0 < self.omega < 1.0:
            raise ValueError(f"omega must lie in (0, 1), got {self.omega}")
        if self.headway <= 0.0:
            raise ValueError(f"headway must be positive, got {self.headway}")


@dataclass(frozen=True, slots=True)
class AgentView:
    """Kinematic view of one player: arc distance to the merge point and speed."""

    dist_to_merge: float
    speed: float

    def __post_init__(self) -> None:
        if self.dist_to_merge < 0.0:
            raise ValueError(f"dist_to_merge must be >= 0, got {self.dist_to_merge}")
        if self.speed <= 0.0:
            raise ValueError(f"speed must be > 0, got {self.speed}")


@dataclass(frozen=True, slots=True)
class GameContext:
    """Everything one matrix needs: paired states, styles, and the headway margin."""

    av: AgentView
    mv: AgentView
    av_style: DrivingStyle
    mv_style: DrivingStyle
    headway_t: float

    def __post_init__(self) -> None:
        if self.headway_t <= 0.0:
            raise ValueError(f"headway_t must be positive, got {self.headway_t}")


@dataclass(frozen=True, slots=True)
class ArrivalTime:
    seconds: float
    infeasible: bool  # go branch hit the floor


def target_arrival_time(ctx: GameContext, role: Role, yields: bool) -> ArrivalTime:
    """Arrival schedule implied by one player's decision.

    The schedule is anchored on the opponent's free-flight arrival d/v:
    yielding targets T seconds after it, going targets T seconds before it.
    A go-branch result at or below the floor is clamped and flagged.
    """
    opp = ctx.mv if role is Role.AV else ctx.av
    base = opp.dist_to_merge / opp.speed
    if yields:
        return ArrivalTime(base + ctx.headway_t, False)
    t = base - ctx.headway_t
    if t <= ARRIVAL_TIME_FLOOR:
        return ArrivalTime(ARRIVAL_TIME_FLOOR, True)
    return ArrivalTime(t, False)


def required_avg_accel(d: float, v: float, t: float) -> float:
    """Constant acceleration that covers distance d from speed v in time t."""
    if t <= 0.0:
        raise ValueError(f"arrival time must be positive, got {t}")
    return 2.0 * (d - v * t) / (t * t)


def conflict_weight(pair: StrategyPair) -> int:
    """1 on conflicting decision pairs: both going, or both hanging back."""
    both_go = pair.av_move is AvMove.MERGE and pair.mv_move is MvMove.ACCELERATE
    both_wait = pair.av_move is AvMove.YIELD and pair.mv_move is MvMove.YIELD
    return 1 if (both_go or both_wait) else 0


@dataclass(frozen=True, slots=True)
class CellCosts:
    """One cell's costs plus the per-term quantities, for testing and tracing."""

    j_av: float
    j_mv: float
    t_av: float
    t_mv: float
    a_av: float
    a_mv: float
    infeasible: bool


def cell_costs(ctx: GameContext, pair: StrategyPair) -> CellCosts:
    av_arr = target_arrival_time(ctx, Role.AV, pair.av_move is AvMove.YIELD)
    mv_arr = target_arrival_time(ctx, Role.MV, pair.mv_move is MvMove.YIELD)
    a_av = required_avg_accel(ctx.av.dist_to_merge, ctx.av.speed, av_arr.seconds)
    a_mv = required_avg_accel(ctx.mv.dist_to_merge, ctx.mv.speed, mv_arr.seconds)
    safety = abs(a_av + a_mv)
    w_s = conflict_weight(pair)
    w_av = ctx.av_style.omega
    w_mv = ctx.mv_style.omega
    j_av = w_av * av_arr.seconds + (1.0 - w_av) * a_av * a_av + w_s * safety
    j_mv = w_mv * mv_arr.seconds + (1.0 - w_mv) * a_mv * a_mv + w_s * safety
    return CellCosts(
        j_av=j_av,
        j_mv=j_mv,
        t_av=av_arr.seconds,
        t_mv=mv_arr.seconds,
        a_av=a_av,
        a_mv=a_mv,
        infeasible=av_arr.infeasible or mv_arr.infeasible,
    )


_PAIRS = (
    StrategyPair(AvMove.YIELD, MvMove.YIELD),
    StrategyPair(AvMove.YIELD, MvMove.ACCELERATE),
    StrategyPair(AvMove.MERGE, MvMove.YIELD),
    StrategyPair(AvMove.MERGE, MvMove.ACCELERATE),
)


def build_matrix(ctx: GameContext) -> PayoffMatrix:
    """Fill all four cells and store fitness = -cost, indexed as in the game table."""
    yy = cell_costs(ctx, _PAIRS[0])
    ya = cell_costs(ctx, _PAIRS[1])
    my = cell_costs(ctx, _PAIRS[2])
    ma = cell_costs(ctx, _PAIRS[3])
    return PayoffMatrix(
        u11=-yy.j_av, u12=-ya.j_av, u21=-my.j_av, u22=-ma.j_av,
        v11=-yy.j_mv, v12=-ya.j_mv, v21=-my.j_mv, v22=-ma.j_mv,
    )


class CellTable:
    """Per-cell kinematics of a context, cached for fast style sweeps.

    Arrival times, accelerations and the safety term do not depend on either
    style weight, so a sweep over the MV's omega only re-weights fixed
    numbers.  ``matrix_at(omega)`` accepts the closed interval [0, 1]; the
    open-interval constraint applies to configured styles, not to scan
    points.
    """

    __slots__ = ("_av_terms", "_mv_time", "_mv_comfort", "_mv_safety")

    def __init__(self, ctx: GameContext) -> None:
        cells = [cell_costs(ctx, pair) for pair in _PAIRS]
        self._av_terms = tuple(-c.j_av for c in cells)
        self._mv_time = tuple(c.t_mv for c in cells)
        self._mv_comfort = tuple(c.a_mv * c.a_mv for c in cells)
        safety = []
        for pair, c in zip(_PAIRS, cells):
            safety.append(conflict_weight(pair) * abs(c.a_av + c.a_mv))
        self._mv_safety = tuple(safety)

    def matrix_at(self, omega_mv: float) -> PayoffMatrix:
        if not 0.0 <= omega_mv <= 1.0:
            raise ValueError(f"scan omega outside [0, 1]: {omega_mv}")
        u = self._av_terms
        v = tuple(
            -(omega_mv * t + (1.0 - omega_mv) * c + s)
            for t, c, s in zip(self._mv_time, self._mv_comfort, self._mv_safety)
        )
        return PayoffMatrix(
            u11=u[0], u12=u[1], u21=u[2], u22=u[3],
            v11=v[0], v12=v[1], v21=v[2], v22=v[3],
        )


def with_mv_omega(ctx: GameContext, omega: float) -> GameContext:
    """Same context with the MV style weight replaced (clamped into the open interval)."""
    eps = 1e-12
    omega = min(max(omega, eps), 1.0 - eps)
    return replace(ctx, mv_style=replace(ctx.mv_style, omega=omega))
