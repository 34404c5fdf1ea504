import numpy as np
import pytest

from evomerge import (
    PayoffMatrix,
    StrategyState,
    build_matrix,
    merge_profile,
    nash_pure,
    select_nash,
    solve_ess,
    stackelberg,
)

ZERO = PayoffMatrix(0, 0, 0, 0, 0, 0, 0, 0)


def entries(m):
    return {(r, c): (getattr(m, f"u{r}{c}"), getattr(m, f"v{r}{c}"))
            for r in (1, 2) for c in (1, 2)}


def brute_force_nash(m):
    """Exhaustive 4-profile deviation check, independent of the library path."""
    table = entries(m)
    out = []
    for r in (1, 2):
        for c in (1, 2):
            u, v = table[(r, c)]
            u_dev = table[(3 - r, c)][0]
            v_dev = table[(r, 3 - c)][1]
            if u_dev <= u and v_dev <= v:
                out.append(StrategyState(float(r == 1), float(c == 1)))
    return out


def test_nash_dominance_matrix():
    # merging strictly dominates for the row player, yielding for the column
    m = PayoffMatrix(u11=0, u12=0, u21=1, u22=1, v11=1, v12=0, v21=1, v22=0)
    profiles = nash_pure(m)
    assert profiles == [StrategyState(0.0, 1.0)]


def test_nash_worked_matrix_matches_brute_force(worked_ctx):
    m = build_matrix(worked_ctx)
    assert set((p.p, p.q) for p in nash_pure(m)) == \
        set((p.p, p.q) for p in brute_force_nash(m))
    # this matrix has the two anti-coordination equilibria
    assert set((p.p, p.q) for p in nash_pure(m)) == {(0.0, 1.0), (1.0, 0.0)}


def test_nash_zero_matrix_all_profiles_then_lexicographic():
    profiles = nash_pure(ZERO)
    assert len(profiles) == 4
    assert select_nash(ZERO) == StrategyState(1.0, 1.0)  # both-yield corner first


def test_select_nash_prefers_pareto_dominant(worked_ctx):
    # the merge/yield profile pays both players strictly more here
    m = build_matrix(worked_ctx)
    assert select_nash(m) == StrategyState(0.0, 1.0)


def test_select_nash_empty_when_no_pure_equilibrium():
    # matching pennies shape: best responses cycle
    m = PayoffMatrix(u11=1, u12=-1, u21=-1, u22=1, v11=-1, v12=1, v21=1, v22=-1)
    assert nash_pure(m) == []
    assert select_nash(m) is None


def test_stackelberg_worked_matrix(worked_ctx):
    m = build_matrix(worked_ctx)
    # two-level brute force: committing to merge makes the driver yield,
    # which pays the leader best
    assert stackelberg(m) == StrategyState(0.0, 1.0)


def test_stackelberg_follower_always_yields():
    m = PayoffMatrix(u11=2, u12=0, u21=5, u22=0, v11=1, v12=0, v21=3, v22=0)
    # the follower prefers yielding against either action; the leader then
    # picks the best column-1 entry
    assert stackelberg(m) == StrategyState(0.0, 1.0)


def test_stackelberg_zero_matrix_tie_breaks_to_yield():
    assert stackelberg(ZERO) == StrategyState(1.0, 1.0)


def test_stackelberg_follower_action_is_best_response():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = PayoffMatrix(*rng.uniform(-10, 10, size=8))
        profile = stackelberg(m)
        table = entries(m)
        r = 1 if profile.p == 1.0 else 2
        c = 1 if profile.q == 1.0 else 2
        assert table[(r, c)][1] >= table[(r, 3 - c)][1]


def test_nash_profiles_pass_deviation_test_randomly():
    rng = np.random.default_rng(6)
    for _ in range(200):
        m = PayoffMatrix(*rng.uniform(-10, 10, size=8))
        got = set((p.p, p.q) for p in nash_pure(m))
        want = set((p.p, p.q) for p in brute_force_nash(m))
        assert got == want


def test_merge_profile_rule():
    assert merge_profile(StrategyState(0.0, 1.0))
    assert not merge_profile(StrategyState(1.0, 0.0))
    assert not merge_profile(StrategyState(1.0, 1.0))
    assert not merge_profile(None)


def test_policy_agreement_rate_report():
    # no fixed threshold: agreement between the unique strict equilibrium
    # views is informational, printed for the record
    rng = np.random.default_rng(7)
    total = agree = 0
    for _ in range(500):
        m = PayoffMatrix(*rng.uniform(-10, 10, size=8))
        report = solve_ess(m)
        nash = select_nash(m)
        if report.has_unique_ess and nash is not None and len(nash_pure(m)) == 1:
            total += 1
            agree += report.ess == nash
    assert total > 0
    print(f"unique-NE/unique-ESS agreement: {agree}/{total}")
