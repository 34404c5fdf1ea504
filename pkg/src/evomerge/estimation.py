"""Online bisection estimation of a hidden driving-style weight.

The estimator keeps an interval [k_l, k_u] believed to contain the opposing
driver's style weight, with the midpoint as the working estimate.  Each
interaction round compares the equilibrium-predicted reaction with the
observed speed change:

  * predicted accelerate (q* = 0) but no observed speed increase: the
    estimate was too aggressive, so the upper bound drops to the lower
    endpoint of the equilibrium's stability interval;
  * predicted yield (q* = 1) but an observed speed increase: the estimate
    was too conservative, so the lower bound rises to the upper endpoint.

Confirmed predictions leave the belief untouched.  The stability interval is
the maximal contiguous range of style weights over which the solver keeps
returning the same equilibrium point for the same kinematic context; it is
found by a grid scan refined with bisection at the boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .egt import StrategyState, solve_ess
from .payoff import CellTable, GameContext

#: Speed deadband below which a change does not count as acceleration.
#: Covers numeric drift in the car-following integration.
SPEED_DEADBAND = 1e-3

#: Default style-scan resolution and boundary refinement tolerance.
DEFAULT_GRID_STEP = 1.0 / 1024.0
REFINE_TOL = 1e-4


@dataclass(frozen=True, slots=True)
class StyleBelief:
    """Bisection interval for a hidden style weight; estimate is the midpoint."""

    k_l: float = 0.0
    k_u: float = 1.0
    inconsistent: bool = False  # set when an update collapsed the interval

    def __post_init__(self) -> None:
        if not (0.0 <= self.k_l <= self.k_u <= 1.0):
            raise ValueError(f"invalid belief bounds [{self.k_l}, {self.k_u}]")
        if self.k_l == self.k_u and not self.inconsistent:
            raise ValueError("degenerate belief interval must carry the inconsistent flag")

    @property
    def omega_hat(self) -> float:
        return 0.5 * (self.k_l + self.k_u)


@dataclass(frozen=True, slots=True)
class Reaction:
    accelerated: bool


def observed_reaction(v_now: float, v_prev: float, deadband: float = SPEED_DEADBAND) -> Reaction:
    """Classify two consecutive speed observations as acceleration or not."""
    return Reaction(accelerated=v_now > v_prev + deadband)


@dataclass(frozen=True, slots=True)
class StabilityInterval:
    """Style-weight range preserving one equilibrium; degenerate when stale."""

    lo: float
    hi: float
    stale: bool = False


def ess_stability_interval(
    ctx: GameContext,
    ess: StrategyState,
    grid_step: float = DEFAULT_GRID_STEP,
) -> StabilityInterval:
    """Maximal contiguous style range around the context's estimate keeping ``ess``.

    Scans omega outward from the context's MV style weight in ``grid_step``
    increments, rebuilding only the MV payoff, and brackets where the solver
    stops returning the same operative equilibrium; each boundary is then
    refined by bisection to within ``REFINE_TOL``.  If the equilibrium does
    not hold even at the estimate itself, the context is stale and the
    degenerate interval is returned flagged.
    """
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    table = CellTable(ctx)
    omega_hat = ctx.mv_style.omega

    def holds(omega: float) -> bool:
        return solve_ess(table.matrix_at(omega)).ess == ess

    if not holds(omega_hat):
        return StabilityInterval(omega_hat, omega_hat, stale=True)

    lo = _scan_boundary(holds, omega_hat, -grid_step, 0.0)
    hi = _scan_boundary(holds, omega_hat, grid_step, 1.0)
    return StabilityInterval(lo, hi, stale=False)


def _scan_boundary(holds, start: float, step: float, limit: float) -> float:
    """Walk from ``start`` by ``step`` until the predicate fails, then bisect."""
    inside = start
    while True:
        candidate = inside + step
        if (step < 0.0 and candidate < limit) or (step > 0.0 and candidate > limit):
            if holds(limit):
                return limit
            outside = limit
            break
        if holds(candidate):
            inside = candidate
        else:
            outside = candidate
            break
    # invariant: holds(inside) and not holds(outside)
    while abs(outside - inside) > REFINE_TOL:
        mid = 0.5 * (inside + outside)
        if holds(mid):
            inside = mid
        else:
            outside = mid
    return inside


def update_belief(
    belief: StyleBelief,
    ess: StrategyState,
    reaction: Reaction,
    ctx: GameContext,
    interval: Optional[StabilityInterval] = None,
    grid_step: float = DEFAULT_GRID_STEP,
    prose_semantics: bool = False,
) -> StyleBelief:
    """One estimation round: tighten a bound on a contradicted prediction.

    ``ctx`` must be the context whose matrix produced ``ess`` (the MV style
    weight equal to the belief midpoint at prediction time); ``interval`` may
    carry a precomputed stability interval to avoid rescanning.  Confirmed
    predictions and collapsed beliefs are no-ops.  ``prose_semantics`` flips
    the two bound assignments; it implements the alternative sign reading and
    is not the default.
    """
    if belief.inconsistent:
        return belief

    predicted_accelerate = ess.q == 0.0
    predicted_yield = ess.q == 1.0
    new_kl, new_ku = belief.k_l, belief.k_u
    if predicted_accelerate and not reaction.accelerated:
        bound = interval if interval is not None else ess_stability_interval(ctx, ess, grid_step)
        if prose_semantics:
            new_kl = bound.hi
        else:
            new_ku = bound.lo
    elif predicted_yield and reaction.accelerated:
        bound = interval if interval is not None else ess_stability_interval(ctx, ess, grid_step)
        if prose_semantics:
            new_ku = bound.lo
        else:
            new_kl = bound.hi
    else:
        return belief

    if new_kl >= new_ku:
        mid = belief.omega_hat
        return StyleBelief(k_l=mid, k_u=mid, inconsistent=True)
    return StyleBelief(k_l=new_kl, k_u=new_ku)
