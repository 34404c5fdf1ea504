"""Asymmetric 2x2 evolutionary game solver.

Two populations (the merging AV and the opposing main-road vehicle) each mix
over two actions.  The state (p, q) holds the probability that the AV yields
and that the MV yields; the replicator vector field

    F(p) = p (1 - p) (E_AV1 - E_AV2)
    F(q) = q (1 - q) (E_MV1 - E_MV2)

drives each population toward the action with above-average fitness.  An
evolutionarily stable strategy is a pure rest point whose Jacobian (diagonal
at pure points) has two strictly negative eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Eigenvalues closer to zero than this are treated as exactly zero, so the
# strict-negativity test fails and the point is not stable.  Guards against
# classifying marginally stable points under floating-point noise.
EIGENVALUE_ZERO_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class PayoffMatrix:
    """Fitness bimatrix of the merging game.

    Row index 1 is AV Yield, row 2 is AV Merge; column index 1 is MV Yield,
    column 2 is MV Accelerate.  ``u`` entries are AV fitness, ``v`` entries
    MV fitness (fitness = negated multi-objective cost).
    """

    u11: float
    u12: float
    u21: float
    u22: float
    v11: float
    v12: float
    v21: float
    v22: float

    def __post_init__(self) -> None:
        for name in ("u11", "u12", "u21", "u22", "v11", "v12", "v21", "v22"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"payoff entry {name} is not finite")


@dataclass(frozen=True, slots=True)
class StrategyState:
    """Mixed-strategy pair: p = P(AV yields), q = P(MV yields)."""

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError(f"strategy probabilities outside [0,1]: ({self.p}, {self.q})")

    def is_pure(self) -> bool:
        return self.p in (0.0, 1.0) and self.q in (0.0, 1.0)


#: The four pure rest points, in canonical order E1..E4.
PURE_POINTS: tuple[StrategyState, ...] = (
    StrategyState(0.0, 0.0),
    StrategyState(0.0, 1.0),
    StrategyState(1.0, 0.0),
    StrategyState(1.0, 1.0),
)


def expected_payoffs(m: PayoffMatrix, s: StrategyState) -> tuple[float, float, float, float, float, float]:
    """Per-action and population-average fitness (E_AV1, E_AV2, E_MV1, E_MV2, E_AV, E_MV)."""
    e_av1 = s.q * m.u11 + (1.0 - s.q) * m.u12
    e_av2 = s.q * m.u21 + (1.0 - s.q) * m.u22
    e_mv1 = s.p * m.v11 + (1.0 - s.p) * m.v21
    e_mv2 = s.p * m.v12 + (1.0 - s.p) * m.v22
    e_av = s.p * e_av1 + (1.0 - s.p) * e_av2
    e_mv = s.q * e_mv1 + (1.0 - s.q) * e_mv2
    return e_av1, e_av2, e_mv1, e_mv2, e_av, e_mv


def replicator_rhs(m: PayoffMatrix, s: StrategyState) -> tuple[float, float]:
    """Replicator vector field (dp/dt, dq/dt) at state s."""
    e_av1, e_av2, e_mv1, e_mv2, _, _ = expected_payoffs(m, s)
    dp = s.p * (1.0 - s.p) * (e_av1 - e_av2)
    dq = s.q * (1.0 - s.q) * (e_mv1 - e_mv2)
    return dp, dq


def eigenvalues_at(m: PayoffMatrix, point: StrategyState) -> tuple[float, float]:
    """Jacobian eigenvalues at a pure rest point.

    At pure points the off-diagonal Jacobian terms carry factors p(1-p) or
    q(1-q) and vanish, so the matrix is diagonal and the eigenvalues are

        lambda1 = (1 - 2p) (E_AV1 - E_AV2)|q
        lambda2 = (1 - 2q) (E_MV1 - E_MV2)|p

    Interior points are rejected: the Jacobian is not diagonal there and the
    rest point is classified by construction in :func:`solve_ess`.
    """
    if not point.is_pure():
        raise ValueError(f"eigenvalues_at requires a pure point, got ({point.p}, {point.q})")
    return _eigenvalues_raw(m, point.p, point.q)


def _eigenvalues_raw(m: PayoffMatrix, p: float, q: float) -> tuple[float, float]:
    e_av1 = q * m.u11 + (1.0 - q) * m.u12
    e_av2 = q * m.u21 + (1.0 - q) * m.u22
    e_mv1 = p * m.v11 + (1.0 - p) * m.v21
    e_mv2 = p * m.v12 + (1.0 - p) * m.v22
    return (1.0 - 2.0 * p) * (e_av1 - e_av2), (1.0 - 2.0 * q) * (e_mv1 - e_mv2)


def _is_stable(lam1: float, lam2: float) -> bool:
    return lam1 <= -EIGENVALUE_ZERO_TOL and lam2 <= -EIGENVALUE_ZERO_TOL


@dataclass(frozen=True, slots=True)
class FixedPoint:
    point: StrategyState
    eigenvalues: Optional[tuple[float, float]]  # None for the interior point
    stable: bool


@dataclass(frozen=True, slots=True)
class EquilibriumReport:
    """Rest points of the replicator system with stability classification.

    ``ess`` carries the operative equilibrium: the unique stable pure point,
    or, when several pure points are stable, the most strongly attracting one
    (smallest slowest eigenvalue).  ``multiple_stable`` flags the latter case
    so the decision layer can fall back conservatively; ``ess`` is None when
    no pure point is stable.
    """

    fixed_points: tuple[FixedPoint, ...]
    stable_points: tuple[StrategyState, ...]
    ess: Optional[StrategyState]
    multiple_stable: bool
    interior: Optional[StrategyState]

    @property
    def has_unique_ess(self) -> bool:
        return self.ess is not None and not self.multiple_stable


def _interior_point(m: PayoffMatrix) -> Optional[StrategyState]:
    """Interior rest point from the two indifference conditions, if any.

    Solves E_AV1 = E_AV2 for q and E_MV1 = E_MV2 for p; a solution counts
    only when both coordinates fall strictly inside (0, 1).
    """
    den_q = m.u11 - m.u21 - m.u12 + m.u22
    den_p = m.v11 - m.v21 - m.v12 + m.v22
    if abs(den_q) < 1e-12 or abs(den_p) < 1e-12:
        return None
    q = (m.u22 - m.u12) / den_q
    p = (m.v22 - m.v21) / den_p
    if 0.0 < p < 1.0 and 0.0 < q < 1.0:
        return StrategyState(p, q)
    return None


def solve_ess(m: PayoffMatrix) -> EquilibriumReport:
    """Enumerate rest points, classify stability, and extract the ESS.

    The four pure points are always reported with their eigenvalues.  The
    interior rest point, when it exists, is listed but never stable: in
    two-population bimatrix replicator dynamics the Jacobian at an interior
    rest point has zero trace, so it cannot be asymptotically stable.
    Degenerate games (zero eigenvalues everywhere) yield ess=None rather
    than a false positive.
    """
    fixed: list[FixedPoint] = []
    stable: list[tuple[StrategyState, float]] = []  # (point, slowest eigenvalue)
    for point in PURE_POINTS:
        lam = _eigenvalues_raw(m, point.p, point.q)
        ok = _is_stable(*lam)
        fixed.append(FixedPoint(point=point, eigenvalues=lam, stable=ok))
        if ok:
            stable.append((point, max(lam)))

    interior = _interior_point(m)
    if interior is not None:
        fixed.append(FixedPoint(point=interior, eigenvalues=None, stable=False))

    if stable:
        pick = min(stable, key=lambda entry: (entry[1], entry[0].p, entry[0].q))[0]
    else:
        pick = None
    return EquilibriumReport(
        fixed_points=tuple(fixed),
        stable_points=tuple(point for point, _ in stable),
        ess=pick,
        multiple_stable=len(stable) > 1,
        interior=interior,
    )


def integrate_replicator(
    m: PayoffMatrix, s0: StrategyState, dt: float, steps: int
) -> list[StrategyState]:
    """Fixed-step RK4 integration of the replicator field from s0.

    Each state is clamped to the unit square after every step.  Returns the
    full trajectory, s0 included, so its length is steps + 1.  Serves as the
    independent dynamical check on the eigenvalue classification.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    traj = [s0]
    p, q = s0.p, s0.q
    for _ in range(steps):
        p, q = _rk4_step(m, p, q, dt)
        traj.append(StrategyState(p, q))
    return traj


def _rhs_raw(m: PayoffMatrix, p: float, q: float) -> tuple[float, float]:
    e_av1 = q * m.u11 + (1.0 - q) * m.u12
    e_av2 = q * m.u21 + (1.0 - q) * m.u22
    e_mv1 = p * m.v11 + (1.0 - p) * m.v21
    e_mv2 = p * m.v12 + (1.0 - p) * m.v22
    return p * (1.0 - p) * (e_av1 - e_av2), q * (1.0 - q) * (e_mv1 - e_mv2)


def _rk4_step(m: PayoffMatrix, p: float, q: float, dt: float) -> tuple[float, float]:
    k1p, k1q = _rhs_raw(m, p, q)
    k2p, k2q = _rhs_raw(m, p + 0.5 * dt * k1p, q + 0.5 * dt * k1q)
    k3p, k3q = _rhs_raw(m, p + 0.5 * dt * k2p, q + 0.5 * dt * k2q)
    k4p, k4q = _rhs_raw(m, p + dt * k3p, q + dt * k3q)
    p = p + dt * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
    q = q + dt * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
    return min(max(p, 0.0), 1.0), min(max(q, 0.0), 1.0)


def integrate_replicator_batch(
    m: PayoffMatrix, starts: np.ndarray, dt: float, steps: int
) -> np.ndarray:
    """Vectorized twin of :func:`integrate_replicator` for many start states.

    ``starts`` has shape (n, 2) with columns (p, q); returns the final states
    with the same shape.  Uses the same RK4 scheme and per-step clamp as the
    scalar integrator, agreeing with it to within float rounding.
    """
    state = np.array(starts, dtype=float, copy=True)
    if state.ndim != 2 or state.shape[1] != 2:
        raise ValueError("starts must have shape (n, 2)")
    u = np.array([[m.u11, m.u12], [m.u21, m.u22]])
    v = np.array([[m.v11, m.v12], [m.v21, m.v22]])

    du = np.array([u[0, 0] - u[1, 0], u[0, 1] - u[1, 1]])  # E_AV1-E_AV2 = du[1] + q*(du[0]-du[1])
    dv = np.array([v[0, 0] - v[0, 1], v[1, 0] - v[1, 1]])  # E_MV1-E_MV2 = dv[1] + p*(dv[0]-dv[1])

    def rhs(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gap_av = du[1] + q * (du[0] - du[1])
        gap_mv = dv[1] + p * (dv[0] - dv[1])
        return p * (1.0 - p) * gap_av, q * (1.0 - q) * gap_mv

    p = state[:, 0]
    q = state[:, 1]
    for _ in range(steps):
        k1p, k1q = rhs(p, q)
        k2p, k2q = rhs(p + 0.5 * dt * k1p, q + 0.5 * dt * k1q)
        k3p, k3q = rhs(p + 0.5 * dt * k2p, q + 0.5 * dt * k2q)
        k4p, k4q = rhs(p + dt * k3p, q + dt * k3q)
        p = p + dt * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        q = q + dt * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
        np.clip(p, 0.0, 1.0, out=p)
        np.clip(q, 0.0, 1.0, out=q)
    return np.stack([p, q], axis=1)
