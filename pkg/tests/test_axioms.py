import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from msvote import axioms
from msvote.axioms import (
    AxiomVerdict,
    SearchConfig,
    UncertifiedWitness,
    check_candidate_monotonicity,
    check_committee_monotonicity,
    check_consistency,
    check_justified_representation,
    check_outputs_jr,
    check_outputs_pareto,
    check_pareto_efficiency,
    check_solid_coalition,
    dominates,
    search_violation,
    verdict_to_json,
)
from msvote.core import Election, RankedBallot, VotingError, approval_election, ranked_election
from msvote.rules import RuleRunner

from conftest import approval_elections, naive_jr, ranked_elections, strict_vectors


def names(e, S):
    return "".join(e.labels(S))


# solid coalition

def test_sntv_keeps_solid_coalition():
    e = ranked_election("abc", [(2, "cab"), (2, "abc")])
    v = check_solid_coalition("l1:plu", e, (2,))
    assert v.holds and v.metadata["coalition_candidates"] == [0, 2]


def test_bloc_drops_solid_coalition():
    e = ranked_election("abc", [(2, "cab"), (1, "abc"), (1, "bac")])
    v = check_solid_coalition("l1:app", e, (2,))
    assert not v.holds
    assert names(e, v.witness["committee"]) == "ab" and e.candidates[v.witness["candidate"]] == "c"
    assert v.witness["threshold"] == 2


def test_solid_coalition_vacuous_and_ceiling():
    e = ranked_election("abc", [(1, "abc"), (1, "bca"), (1, "cab")])
    v = check_solid_coalition("l1:plu", e, (2,))
    assert v.holds and v.metadata["vacuous"]
    # exact threshold 3/2 is met by nobody; ceiling 2 is met by nobody either
    assert check_solid_coalition("l1:plu", e, (2,), ceiling=True).holds
    with pytest.raises(VotingError):
        check_solid_coalition("thiele:av", approval_election("ab", [(1, {"a"})]), (1,))


# committee monotonicity

def test_committee_monotonicity_direction_i_violation():
    from msvote.counterexamples import build
    s = build("T2_L1_A", "l1:borda")
    e = s.elections["E"]
    v = check_committee_monotonicity("l1:borda", e, (4, 2), (2, 1))
    assert not v.holds
    # {a} has no superset among the (4, 2) finals, which are only {b, c}
    assert v.witness["direction"] == "i" and names(e, v.witness["committee"]) == "a"
    # argument order does not matter
    assert check_committee_monotonicity("l1:borda", e, (2, 1), (4, 2)).witness == v.witness


@given(approval_elections(min_m=3, max_m=6, max_n=8), st.data())
def test_single_stage_av_is_committee_monotone(e, data):
    k = data.draw(st.integers(1, e.m - 2))
    assert check_committee_monotonicity("thiele:av", e, (k,), (k + 1,)).holds


def test_committee_monotonicity_unanimous_and_errors():
    e = ranked_election("abcd", [(3, "abcd")])
    assert check_committee_monotonicity("l1:borda", e, (2,), (3,)).holds
    with pytest.raises(VotingError):
        check_committee_monotonicity("l1:borda", e, (2,), (3, 1))
    with pytest.raises(VotingError):
        check_committee_monotonicity("l1:borda", e, (3,), (1,))


# candidate monotonicity

def t3_election():
    from msvote.core import all_permutations, cycles
    groups = [(10, s) for s in cycles("cab")] + [(1, p) for p in all_permutations("abc")]
    return ranked_election("abc", groups)


@pytest.mark.parametrize("rule", ["l1:borda", "lmax:borda", "l1:plu"])
def test_two_stage_candidate_monotonicity_violation(rule):
    e = t3_election()
    v = check_candidate_monotonicity(rule, e, (2, 1))
    assert not v.holds
    after = RuleRunner.of(rule)(v.witness["perturbed"], (2, 1))
    assert all(v.witness["candidate"] not in S for S in after)


def test_single_ballot_is_candidate_monotone():
    e = ranked_election("abc", [(1, "bca")])
    v = check_candidate_monotonicity("l1:plu", e, (1,))
    assert v.holds and v.metadata["skipped_noop"] == 1 and v.metadata["checked"] == 0


def test_pav_approval_candidate_monotonicity_violation():
    e = approval_election("abc", [(4, {"a", "c"}), (4, {"b", "c"}), (2, {"a"}), (2, {"b"})])
    v = check_candidate_monotonicity("thiele:pav", e, (2, 1))
    # the construction is symmetric in a and b; the scan meets a first
    assert not v.holds and e.candidates[v.witness["candidate"]] in ("a", "b")
    assert v.witness["perturbed"].n == e.n


def test_candidate_shift_splits_one_voter_off():
    e = ranked_election("abc", [(3, "bac")])
    e2 = axioms._perturbed(e, 0, 0)
    assert [(b.ranking, b.weight) for b in e2.ballots] == [((1, 0, 2), 2), ((0, 1, 2), 1)]


# consistency

def test_consistency_violation_on_union():
    from msvote.counterexamples import build
    s = build("T4_1", "l1:borda")
    v = check_consistency("l1:borda", s.elections["V1"], s.elections["V2"], (4, 1))
    assert not v.holds
    assert v.witness["intersection"] == [(0,)] and v.witness["union"] == [(1,)]


@given(ranked_elections(min_m=3, max_m=5, max_n=6), st.sampled_from(["l1:plu", "l1:borda", "lmax:borda", "l1:app"]), st.data())
def test_self_union_is_consistent_ranked(e, rule, data):
    v = data.draw(strict_vectors(e.m))
    assert check_consistency(rule, e, e, v).holds


@given(approval_elections(min_m=3, max_m=5, max_n=6), st.sampled_from(["thiele:av", "thiele:pav", "thiele:acc"]), st.data())
def test_self_union_is_consistent_approval(e, rule, data):
    v = data.draw(strict_vectors(e.m))
    assert check_consistency(rule, e, e, v).holds


def test_consistency_vacuous_and_errors():
    e1 = ranked_election("ab", [(1, "ab")])
    e2 = ranked_election("ab", [(1, "ba")])
    v = check_consistency("l1:plu", e1, e2, (1,))
    assert v.holds and v.metadata["vacuous"]
    with pytest.raises(VotingError):
        check_consistency("l1:plu", e1, ranked_election("ac", [(1, "ac")]), (1,))


# justified representation

def test_jr_examples():
    e = approval_election("abc", [(2, {"a", "b"}), (2, {"c"})])
    bad = check_justified_representation(e, (0, 1), 2)
    assert not bad.holds and e.candidates[bad.witness["candidate"]] == "c"
    assert check_justified_representation(e, (0, 2), 2).holds
    full = approval_election("abc", [(1, {"a"}), (1, {"a", "b"}), (3, {"c", "b"})])
    assert check_justified_representation(full, (0, 1), 2).holds


@given(approval_elections(min_m=2, max_m=5, max_n=8), st.booleans(), st.data())
def test_jr_matches_subset_brute_force(e, ceiling, data):
    k = data.draw(st.integers(1, e.m - 1))
    S = tuple(sorted(data.draw(st.permutations(range(e.m)))[:k]))
    assert check_justified_representation(e, S, k, ceiling).holds == naive_jr(e, S, k, ceiling)


@given(approval_elections(min_m=3, max_m=6, max_n=8), st.data())
def test_multistage_pav_outputs_satisfy_jr(e, data):
    v = data.draw(strict_vectors(e.m))
    assert check_outputs_jr("thiele:pav", e, v).holds


# Pareto efficiency

def test_pareto_examples():
    e = approval_election("abcd", [(2, {"a", "b"}), (1, {"c"})])
    assert check_pareto_efficiency(e, (0, 1), 2).holds
    bad = check_pareto_efficiency(e, (2, 3), 2)
    assert not bad.holds and dominates(e, bad.witness["dominating"], (2, 3))
    for S in itertools.combinations(range(4), 2):
        assert not dominates(e, S, S)


def brute_force_dominated(e, S, k):
    for T in itertools.combinations(range(e.m), k):
        diffs = [len(b.approved & set(T)) - len(b.approved & set(S)) for b in e.ballots]
        if all(d >= 0 for d in diffs) and any(d > 0 for d in diffs):
            return True
    return False


@given(approval_elections(min_m=2, max_m=5, max_n=6), st.data())
def test_pareto_matches_brute_force(e, data):
    k = data.draw(st.integers(1, e.m - 1))
    S = tuple(sorted(data.draw(st.permutations(range(e.m)))[:k]))
    assert check_pareto_efficiency(e, S, k).holds == (not brute_force_dominated(e, S, k))


@given(approval_elections(min_m=3, max_m=5, max_n=6), st.data())
def test_single_stage_av_outputs_are_pareto_efficient(e, data):
    k = data.draw(st.integers(1, e.m - 1))
    assert check_outputs_pareto("thiele:av", e, (k,)).holds


# self-certification

@dataclass(frozen=True)
class FlakyRunner(RuleRunner):
    calls: list = field(default_factory=list)

    def __call__(self, e, v):
        self.calls.append(1)
        return frozenset({(1,)}) if len(self.calls) == 1 else frozenset({(0,)})


def test_irreproducible_witness_is_refused():
    e = ranked_election("ab", [(3, "ab")])
    runner = FlakyRunner(RuleRunner.of("l1:plu").rules)
    with pytest.raises(UncertifiedWitness):
        check_solid_coalition(runner, e, (1,))


# rendering

def test_verdict_json_uses_labels():
    e = ranked_election("abc", [(2, "cab"), (1, "abc"), (1, "bac")])
    doc = verdict_to_json(check_solid_coalition("l1:app", e, (2,)), e)
    assert doc["witness"]["candidate"] == "c" and doc["witness"]["committee"] == ["a", "b"]
    json.dumps(doc)


# randomized search

def test_search_single_stage_sntv_finds_nothing():
    assert search_violation("candidate-monotonicity", "l1:plu",
                            SearchConfig(max_m=4, max_n=6), seed=0, budget=2000) is None


def test_search_two_stage_sntv_finds_witness():
    found = search_violation("candidate-monotonicity", "l1:plu;l1:plu",
                             SearchConfig(max_m=4, max_n=10), seed=0, budget=2000)
    assert found is not None
    v = found["verdict"]
    assert not v.holds
    runner = RuleRunner.of("l1:plu;l1:plu")
    assert all(v.witness["candidate"] not in S for S in runner(v.witness["perturbed"], found["vector"]))
    again = search_violation("candidate-monotonicity", "l1:plu;l1:plu",
                             SearchConfig(max_m=4, max_n=10), seed=0, budget=2000)
    assert again["trial"] == found["trial"]


def test_smallest_two_stage_sntv_violation_has_nine_voters():
    # exhaustive over every multiset of rankings on three candidates
    runner = RuleRunner.of("l1:plu;l1:plu")
    perms = list(itertools.permutations(range(3)))
    first = None
    for n in range(1, 10):
        for combo in itertools.combinations_with_replacement(range(6), n):
            e = Election("abc", tuple(RankedBallot(perms[i]) for i in combo))
            if not check_candidate_monotonicity(runner, e, (2, 1)).holds:
                first = n
                break
        if first:
            break
    assert first == 9


def test_known_nine_voter_witness():
    e = ranked_election("abc", [(3, "abc"), (3, "bac"), (2, "cab"), (1, "cba")])
    runner = RuleRunner.of("l1:plu;l1:plu")
    assert sorted(names(e, S) for S in runner(e, (2, 1))) == ["a", "b"]
    shifted = ranked_election("abc", [(3, "abc"), (3, "bac"), (2, "cab"), (1, "bca")])
    assert [names(e, S) for S in runner(shifted, (2, 1))] == ["a"]


def test_search_edge_cases():
    assert search_violation("consistency", "l1:plu", seed=3, budget=0) is None
    with pytest.raises(VotingError):
        search_violation("no-such-axiom", "l1:plu")
    with pytest.raises(VotingError):
        search_violation("justified-representation", "l1:plu")
    with pytest.raises(VotingError):
        SearchConfig(min_m=5, max_m=3)


@pytest.mark.parametrize("axiom", ["committee-monotonicity", "consistency", "justified-representation",
                                   "pareto-efficiency", "candidate-monotonicity"])
def test_search_runs_for_approval_axioms(axiom):
    out = search_violation(axiom, "thiele:av", SearchConfig(max_m=4, max_n=5), seed=1, budget=50)
    assert out is None or isinstance(out["verdict"], AxiomVerdict)
