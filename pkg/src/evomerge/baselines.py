"""Nash and Stackelberg decision policies on the same payoff matrices.

Both baselines consume the exact matrices the evolutionary policy plays on
and differ only in how they pick a profile, which isolates the equilibrium
concept as the experimental variable.
"""

from __future__ import annotations

from enum import Enum

from .egt import PayoffMatrix, StrategyState


class Policy(Enum):
    EGT = "egt"
    NASH = "nash"
    STACKELBERG = "stackelberg"


#: Pure profiles as (p, q) strategy states: rows AV Yield/Merge map to
#: p = 1/0, columns MV Yield/Accelerate map to q = 1/0.
_PROFILES = (
    (StrategyState(1.0, 1.0), "u11", "v11"),
    (StrategyState(1.0, 0.0), "u12", "v12"),
    (StrategyState(0.0, 1.0), "u21", "v21"),
    (StrategyState(0.0, 0.0), "u22", "v22"),
)


def _payoffs(m: PayoffMatrix, profile: StrategyState) -> tuple[float, float]:
    row = 1 if profile.p == 1.0 else 2
    col = 1 if profile.q == 1.0 else 2
    return getattr(m, f"u{row}{col}"), getattr(m, f"v{row}{col}")


def nash_pure(m: PayoffMatrix) -> list[StrategyState]:
    """All pure Nash profiles: no player gains by a unilateral strict deviation."""
    result = []
    for profile, _, _ in _PROFILES:
        u, v = _payoffs(m, profile)
        flipped_row = StrategyState(1.0 - profile.p, profile.q)
        flipped_col = StrategyState(profile.p, 1.0 - profile.q)
        u_dev, _ = _payoffs(m, flipped_row)
        _, v_dev = _payoffs(m, flipped_col)
        if u_dev <= u and v_dev <= v:
            result.append(profile)
    return result


def select_nash(m: PayoffMatrix) -> StrategyState | None:
    """Deterministic selection among pure Nash profiles.

    Prefers a Pareto-dominant profile if one exists, then the largest joint
    fitness, then the lexicographically first (p, q).  None when the game has
    no pure Nash profile.
    """
    candidates = nash_pure(m)
    if not candidates:
        return None
    if len(candidates) == 1:
        return candidates[0]

    def dominates(a: StrategyState, b: StrategyState) -> bool:
        ua, va = _payoffs(m, a)
        ub, vb = _payoffs(m, b)
        return ua >= ub and va >= vb and (ua > ub or va > vb)

    pareto = [c for c in candidates if all(c == o or not dominates(o, c) for o in candidates)]
    dominant = [c for c in pareto if all(c == o or dominates(c, o) for o in candidates)]
    if len(dominant) == 1:
        return dominant[0]
    # joint fitness, then table order (both-yield corner first)
    return max(candidates, key=lambda c: (sum(_payoffs(m, c)), c.p, c.q))


def stackelberg(m: PayoffMatrix) -> StrategyState:
    """Leader-follower profile with the AV leading.

    For each AV pure action the MV best-responds (ties resolved to Yield);
    the AV commits to the action whose induced response pays it best, ties
    again resolved to Yield.
    """
    best: tuple[float, float, StrategyState] | None = None
    for p in (1.0, 0.0):  # Yield first so AV ties resolve to Yield
        # MV response, Yield bias on ties
        responses = []
        for q in (1.0, 0.0):
            profile = StrategyState(p, q)
            _, v = _payoffs(m, profile)
            responses.append((v, q, profile))
        follower = max(responses, key=lambda r: (r[0], r[1]))
        u, _ = _payoffs(m, follower[2])
        if best is None or u > best[0]:
            best = (u, p, follower[2])
    assert best is not None
    return best[2]


def merge_profile(profile: StrategyState | None) -> bool:
    """True when a pure profile prescribes the merge-ahead maneuver (p < q)."""
    return profile is not None and profile.p < profile.q
