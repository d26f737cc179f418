import pytest
from hypothesis import given
from hypothesis import strategies as st

from msvote.core import StageVector, VotingError, first_place_count, quota, ranked_election
from msvote.multistage import (
    Trajectory,
    preset_baldwin,
    preset_stv,
    run_deterministic,
    run_multistage,
    validate_trajectory,
)
from msvote.score_rules import BORDA, L1, LMAX, PLU, PRESETS, ScoreRule, single_stage_winners

from conftest import naive_multistage, naive_winners, ranked_elections, strict_vectors

RULES = [ScoreRule(b, g) for b in (L1, LMAX) for g in PRESETS.values()]
SNTV = ScoreRule(L1, PLU)
CYCLE3 = ranked_election("abc", [(1, "abc"), (1, "bca"), (1, "cab")])


def named(e, finals):
    return sorted("".join(e.labels(S)) for S in finals)


def test_stv_style_two_stage_plurality():
    e = ranked_election("abc", [(3, "abc"), (2, "bca"), (2, "cba")])
    res = run_multistage(SNTV, e, (2, 1))
    assert named(e, res.finals) == ["b", "c"]
    assert not res.truncated


def test_single_stage_degenerates_to_winner_set():
    e = ranked_election("abcd", [(2, "abcd"), (1, "dcba"), (1, "cadb")])
    for rule in RULES:
        assert run_multistage(rule, e, (2,)).finals == frozenset(single_stage_winners(rule, e, 2))


def test_presets():
    rules, v = preset_stv(4)
    assert v.sizes == (3, 2, 1) and len(rules) == 3 and all(r == SNTV for r in rules)
    rules, v = preset_stv(2)
    assert v.sizes == (1,) and len(rules) == 1
    rules, v = preset_baldwin(3)
    assert v.sizes == (2, 1) and all(r == ScoreRule(L1, BORDA) for r in rules)
    with pytest.raises(VotingError):
        preset_stv(1)
    with pytest.raises(VotingError):
        preset_baldwin(0)


@pytest.mark.parametrize("preset", [preset_stv, preset_baldwin])
def test_unanimous_top_wins_elimination_presets(preset):
    e = ranked_election("abcd", [(3, "cabd"), (2, "cdba"), (1, "cbad")])
    rules, v = preset(4)
    assert named(e, run_multistage(rules, e, v).finals) == ["c"]


def test_baldwin_on_condorcet_cycle_reaches_every_candidate():
    rules, v = preset_baldwin(3)
    assert named(CYCLE3, run_multistage(rules, CYCLE3, v).finals) == ["a", "b", "c"]


def test_deterministic_run_on_cycle():
    rule = ScoreRule(L1, BORDA)
    final, traj = run_deterministic(rule, CYCLE3, (2, 1))
    # every pair ties in stage one, so {a, b} is taken and a beats b 2:1
    assert traj.sets == ((0, 1, 2), (0, 1), (0,))
    assert final == (0,)
    assert run_deterministic(rule, CYCLE3, (2, 1)) == (final, traj)


def test_deterministic_equals_unique_trajectory():
    e = ranked_election("abcd", [(4, "abcd"), (2, "bcda"), (1, "dcab")])
    rule = ScoreRule(L1, BORDA)
    res = run_multistage(rule, e, (3, 1))
    assert len(res.finals) == 1
    final, traj = run_deterministic(rule, e, (3, 1))
    assert res.trajectories[final] == traj


def test_invalid_vectors_are_rejected():
    e = ranked_election("abc", [(1, "abc")])
    with pytest.raises(VotingError):
        run_multistage(SNTV, e, (3, 1))
    with pytest.raises(VotingError):
        run_multistage((SNTV, SNTV, SNTV), e, (2, 1))


def test_frontier_cap_reports_truncation():
    labels = "abcdef"
    e = ranked_election(labels, [(1, labels)])
    # plurality gives every pair of non-top candidates the same score
    res = run_multistage(SNTV, e, (4, 2, 1), frontier_cap=2)
    assert res.truncated
    assert res.finals


def test_relaxed_full_first_stage_is_identity():
    e = ranked_election("abcd", [(2, "abcd"), (1, "dcba"), (2, "bdca")])
    for rule in RULES:
        plain = run_multistage(rule, e, (2, 1)).finals
        assert run_multistage(rule, e, StageVector((4, 2, 1), relaxed=True)).finals == plain
        assert run_multistage(rule, e, StageVector((2, 2, 1), relaxed=True)).finals == plain


@given(ranked_elections(max_m=6, max_n=10), st.sampled_from(RULES), st.data())
def test_t1_matches_single_stage(e, rule, data):
    k = data.draw(st.integers(1, e.m - 1))
    assert run_multistage(rule, e, (k,)).finals == frozenset(single_stage_winners(rule, e, k))


@given(ranked_elections(min_m=3, max_m=6, max_n=8), st.sampled_from(RULES), st.data())
def test_finals_match_recursive_brute_force(e, rule, data):
    v = data.draw(strict_vectors(e.m))
    expected = naive_multistage(lambda el, pool, k: naive_winners(rule.beta, rule.gamma, el, pool, k), e, v)
    assert run_multistage(rule, e, v).finals == expected


@given(ranked_elections(min_m=3, max_m=6, max_n=8), st.sampled_from(RULES), st.data())
def test_trajectories_revalidate_and_shrink(e, rule, data):
    v = data.draw(strict_vectors(e.m))
    res = run_multistage(rule, e, v)
    for S, traj in res.trajectories.items():
        assert traj.final == S
        assert validate_trajectory(rule, e, v, traj)
        sizes = [len(x) for x in traj.sets]
        assert sizes == [e.m, *v]
        assert all(set(b) < set(a) for a, b in zip(traj.sets, traj.sets[1:]))


def test_validate_trajectory_rejects_non_winners():
    rule = ScoreRule(L1, BORDA)
    e = ranked_election("abc", [(3, "abc")])
    assert validate_trajectory(rule, e, (2, 1), Trajectory(((0, 1, 2), (0, 1), (0,))))
    assert not validate_trajectory(rule, e, (2, 1), Trajectory(((0, 1, 2), (1, 2), (1,))))
    assert not validate_trajectory(rule, e, (2, 1), Trajectory(((0, 1, 2), (0, 1))))


@given(ranked_elections(min_m=2, max_m=6, max_n=12), st.data())
def test_multistage_sntv_keeps_solid_coalitions(e, data):
    v = data.draw(strict_vectors(e.m))
    threshold = quota(e.n, v[-1])
    finals = run_multistage(SNTV, e, v).finals
    for c in range(e.m):
        if first_place_count(e, c) >= threshold:
            assert all(c in S for S in finals)
