"""Vehicle kinematics, IDM car-following, queue formation, collision checks.

The road is modeled as two parallel lanes sharing one arc-length coordinate:
the main lane and the ramp, meeting at the merge point.  Geometry follows
the scenario layout: the gap decision is made in the merging area upstream
of the merge point, the lane change is executed in the convergence area
downstream of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

# Road geometry (arc-length coordinates, meters).
MERGE_POINT_S = 200.0
MERGE_AREA = (120.0, 200.0)
CONVERGENCE_AREA = (200.0, 260.0)

VEHICLE_LENGTH = 5.0

#: Hard deceleration bound for car-following output, m/s^2.
EMERGENCY_DECEL = 8.0


class Lane(Enum):
    MAIN = "main"
    RAMP = "ramp"


@dataclass(frozen=True, slots=True)
class VehicleState:
    """Longitudinal state of one vehicle on the shared arc-length axis."""

    vid: str
    lane: Lane
    s: float
    v: float
    a: float = 0.0
    length: float = VEHICLE_LENGTH

    def __post_init__(self) -> None:
        if self.v < 0.0:
            raise ValueError(f"speed must be >= 0, got {self.v}")

    @property
    def dist_to_merge(self) -> float:
        return MERGE_POINT_S - self.s


def step_kinematics(state: VehicleState, u: float, t_s: float) -> VehicleState:
    """Discrete double-integrator update with a nonnegative-speed clamp.

    s' = s + T_s v,  v' = max(0, v + T_s u),  a' = u.
    """
    if t_s <= 0.0:
        raise ValueError(f"step size must be positive, got {t_s}")
    return replace(
        state,
        s=state.s + t_s * state.v,
        v=max(0.0, state.v + t_s * u),
        a=u,
    )


@dataclass(frozen=True, slots=True)
class IDMParams:
    """Intelligent-driver-model parameters; T and v0 carry the driving style."""

    v0: float = 15.0
    T: float = 1.5
    a_max: float = 1.5
    b: float = 2.0
    s0: float = 2.0
    delta: float = 4.0

    def __post_init__(self) -> None:
        for name in ("v0", "T", "a_max", "b", "s0"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"IDM parameter {name} must be positive")
        if self.delta < 1.0:
            raise ValueError("delta must be >= 1")


#: Stand-in gap when a vehicle has no leader.
FREE_ROAD_GAP = 1.0e6


def idm_accel(p: IDMParams, v: float, gap: float, dv: float) -> float:
    """IDM acceleration for speed v, bumper gap, and closing speed dv = v - v_leader.

    a = a_max [1 - (v/v0)^delta - (s*/gap)^2],
    s* = s0 + v T + v dv / (2 sqrt(a_max b)),
    clamped to [-EMERGENCY_DECEL, a_max].  A non-positive gap means the
    configuration has already collided and is rejected rather than clamped.
    """
    if gap <= 0.0:
        raise ValueError(f"non-positive gap {gap}: vehicles already overlap")
    s_star = p.s0 + v * p.T + v * dv / (2.0 * math.sqrt(p.a_max * p.b))
    a = p.a_max * (1.0 - (v / p.v0) ** p.delta - (s_star / gap) ** 2)
    return min(max(a, -EMERGENCY_DECEL), p.a_max)


@dataclass(frozen=True, slots=True)
class PriorityQueue:
    """Vehicle ids ordered by projected merge-point arrival, best first."""

    order: tuple[str, ...]

    def rank_of(self, vid: str) -> int:
        """1-based priority of a vehicle."""
        return self.order.index(vid) + 1


def projected_arrival(state: VehicleState) -> float:
    """Time to the merge point at current speed; negative once past it."""
    return state.dist_to_merge / max(state.v, 1e-9)


def merging_list(states: Sequence[VehicleState]) -> PriorityQueue:
    """Priority queue by projected arrival; ties go to the main lane, then id."""
    if not states:
        raise ValueError("merging_list needs at least one vehicle")
    ids = [s.vid for s in states]
    if len(set(ids)) != len(ids):
        raise ValueError("vehicle ids must be unique")
    ranked = sorted(
        states,
        key=lambda s: (projected_arrival(s), 0 if s.lane is Lane.MAIN else 1, s.vid),
    )
    return PriorityQueue(order=tuple(s.vid for s in ranked))


def bumper_gap(rear: VehicleState, front: VehicleState) -> float:
    """Bumper-to-bumper distance; negative when the bodies overlap."""
    return (front.s - rear.s) - 0.5 * (front.length + rear.length)


def check_collision(states: Sequence[VehicleState]) -> list[tuple[str, str]]:
    """Same-lane pairs whose bodies overlap."""
    hits: list[tuple[str, str]] = []
    ordered = sorted(states, key=lambda s: (s.lane.value, s.s, s.vid))
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if b.lane is not a.lane:
                break
            if abs(a.s - b.s) < 0.5 * (a.length + b.length):
                pair = (a.vid, b.vid) if a.vid < b.vid else (b.vid, a.vid)
                hits.append(pair)
    return hits


# Ground-truth link between a preferred time headway and the style weight:
# shorter headways read as more aggressive.  The inverse maps a style back to
# a headway for vehicles whose headway is not configured directly.
STYLE_HEADWAY_REF = 2.5
STYLE_HEADWAY_SPAN = 2.0
STYLE_MIN, STYLE_MAX = 0.05, 0.95


def style_from_headway(headway: float) -> float:
    raw = (STYLE_HEADWAY_REF - headway) / STYLE_HEADWAY_SPAN
    return min(max(raw, STYLE_MIN), STYLE_MAX)


def headway_from_style(omega: float) -> float:
    return STYLE_HEADWAY_REF - STYLE_HEADWAY_SPAN * omega


#: Extra desired speed granted to aggressive styles, m/s at omega = 1.
DESIRED_SPEED_SLACK = 6.0

#: Style-linked acceleration limit: a_max = ACCEL_BASE + ACCEL_SLOPE * omega.
#: Aggressive drivers push harder; conservative drivers regain speed lazily,
#: which keeps their post-yield recovery below the reaction deadband.
ACCEL_BASE = 0.6
ACCEL_SLOPE = 1.6


def desired_speed(omega: float, flow_speed: float, slack: float = DESIRED_SPEED_SLACK) -> float:
    """Style-linked IDM desired speed.

    Neutral and conservative drivers are content with the prevailing flow
    speed; aggressive drivers want to travel above it.  This keeps an
    undisturbed platoon from drifting upward en masse while still letting
    aggressive drivers close gaps actively.
    """
    return flow_speed + slack * max(0.0, 2.0 * (omega - 0.5))


def style_accel_limit(omega: float) -> float:
    return ACCEL_BASE + ACCEL_SLOPE * omega


def idm_params_for_style(omega: float, headway: float, flow_speed: float,
                         slack: float = DESIRED_SPEED_SLACK) -> IDMParams:
    return IDMParams(v0=desired_speed(omega, flow_speed, slack), T=headway,
                     a_max=style_accel_limit(omega))
