"""Instance-level axiom checks for any rule runner, plus randomized search.

Every check answers "does the axiom hold on THIS election (and its
perturbation family)". A violated verdict carries a witness and is
re-derived from scratch before it is returned.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    ApprovalBallot,
    CapExceeded,
    Election,
    RankedBallot,
    StageVector,
    VotingError,
    committee,
    election_to_dict,
    enum_cap,
    first_place_count,
    quota,
)
from .generate import random_approval, random_ranked, random_vector
from .rules import RuleRunner

SOLID_COALITION = "solid-coalition"
COMMITTEE_MONOTONICITY = "committee-monotonicity"
CANDIDATE_MONOTONICITY = "candidate-monotonicity"
CONSISTENCY = "consistency"
JUSTIFIED_REPRESENTATION = "justified-representation"
PARETO_EFFICIENCY = "pareto-efficiency"

AXIOMS = (
    SOLID_COALITION,
    COMMITTEE_MONOTONICITY,
    CANDIDATE_MONOTONICITY,
    CONSISTENCY,
    JUSTIFIED_REPRESENTATION,
    PARETO_EFFICIENCY,
)


class UncertifiedWitness(AssertionError):
    """A violation could not be reproduced from its own witness."""


@dataclass(frozen=True)
class AxiomVerdict:
    axiom: str
    holds: bool
    witness: dict | None = None
    metadata: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _certify(ok: bool, axiom: str) -> None:
    if not ok:
        raise UncertifiedWitness(f"{axiom} witness failed to reproduce")


_COMMITTEE_KEYS = {"committee", "dominating"}
_FAMILY_KEYS = {"finals_before", "finals_after", "first", "second", "intersection", "union",
                "small_finals", "large_finals"}


def _render(e: Election, d):
    if d is None:
        return None
    out = {}
    for key, val in d.items():
        if key in _COMMITTEE_KEYS:
            out[key] = e.labels(val)
        elif key in _FAMILY_KEYS:
            out[key] = [e.labels(S) for S in val]
        elif key == "candidate":
            out[key] = e.candidates[val]
        elif key == "coalition_candidates":
            out[key] = e.labels(val)
        elif isinstance(val, Election):
            out[key] = election_to_dict(val)
        elif isinstance(val, Fraction):
            out[key] = str(val)
        else:
            out[key] = val
    return out


def verdict_to_json(verdict: AxiomVerdict, e: Election) -> dict:
    """Labels instead of indices; elections as their file form."""
    return {"axiom": verdict.axiom, "holds": verdict.holds,
            "witness": _render(e, verdict.witness), "metadata": _render(e, verdict.metadata)}


# solid coalition

def check_solid_coalition(runner, e: Election, v, ceiling: bool = False) -> AxiomVerdict:
    if not e.is_ranked:
        raise VotingError("solid coalition is defined for ranked profiles")
    runner = RuleRunner.of(runner)
    v = StageVector.of(v)
    finals = runner(e, v)
    threshold = quota(e.n, v.last, ceiling)
    coalitions = [c for c in range(e.m) if first_place_count(e, c) >= threshold]
    for c in coalitions:
        for S in sorted(finals):
            if c not in S:
                again = runner(e, v)
                _certify(S in again and c not in S and first_place_count(e, c) >= threshold,
                         SOLID_COALITION)
                return AxiomVerdict(SOLID_COALITION, False,
                                    {"candidate": c, "committee": S,
                                     "first_places": first_place_count(e, c), "threshold": threshold},
                                    {"vector": v.sizes})
    return AxiomVerdict(SOLID_COALITION, True, None,
                        {"vector": v.sizes, "coalition_candidates": coalitions,
                         "vacuous": not coalitions})


# committee monotonicity

def check_committee_monotonicity(runner, e: Election, v1, v2) -> AxiomVerdict:
    """Both directions of extension between vectors whose last sizes differ by one."""
    runner = RuleRunner.of(runner)
    v1, v2 = StageVector.of(v1), StageVector.of(v2)
    if v1.t != v2.t:
        raise VotingError(f"vectors have different lengths: {v1.sizes} vs {v2.sizes}")
    if abs(v1.last - v2.last) != 1:
        raise VotingError(f"last sizes must differ by exactly one: {v1.sizes} vs {v2.sizes}")
    small, large = (v1, v2) if v1.last < v2.last else (v2, v1)
    fs, fl = runner(e, small), runner(e, large)
    meta = {"small": small.sizes, "large": large.sizes,
            "small_finals": sorted(fs), "large_finals": sorted(fl)}
    for S in sorted(fs):
        if not any(set(S) < set(L) for L in fl):
            again = runner(e, large)
            _certify(S in runner(e, small) and not any(set(S) < set(L) for L in again),
                     COMMITTEE_MONOTONICITY)
            return AxiomVerdict(COMMITTEE_MONOTONICITY, False,
                                {"direction": "i", "committee": S, "vector": small.sizes,
                                 "missing_superset_in": large.sizes}, meta)
    for L in sorted(fl):
        if not any(set(S) < set(L) for S in fs):
            again = runner(e, small)
            _certify(L in runner(e, large) and not any(set(S) < set(L) for S in again),
                     COMMITTEE_MONOTONICITY)
            return AxiomVerdict(COMMITTEE_MONOTONICITY, False,
                                {"direction": "ii", "committee": L, "vector": large.sizes,
                                 "missing_subset_in": small.sizes}, meta)
    return AxiomVerdict(COMMITTEE_MONOTONICITY, True, None, meta)


# candidate monotonicity

def _perturbed(e: Election, index: int, c: int):
    """Move one voter of ballot ``index`` in favour of ``c``; None if no-op."""
    b = e.ballots[index]
    if isinstance(b, RankedBallot):
        pos = b.ranking.index(c)
        if pos == 0:
            return None
        order = list(b.ranking)
        order[pos - 1], order[pos] = order[pos], order[pos - 1]
        moved = RankedBallot(tuple(order), 1)
    else:
        if c in b.approved:
            return None
        moved = ApprovalBallot(b.approved | {c}, 1)
    ballots = list(e.ballots)
    rest = [type(b)(b.ranking if isinstance(b, RankedBallot) else b.approved, b.weight - 1)] if b.weight > 1 else []
    ballots[index:index + 1] = rest + [moved]
    return e.with_ballots(ballots)


def check_candidate_monotonicity(runner, e: Election, v) -> AxiomVerdict:
    """Shift (ranked) or add an approval (approval) for one voter at a time."""
    runner = RuleRunner.of(runner)
    v = StageVector.of(v)
    finals = runner(e, v)
    members = sorted({c for S in finals for c in S})
    skipped = checked = 0
    for c in members:
        for i in range(len(e.ballots)):
            e2 = _perturbed(e, i, c)
            if e2 is None:
                skipped += 1
                continue
            checked += 1
            after = runner(e2, v)
            if not any(c in S for S in after):
                _certify(any(c in S for S in runner(e, v))
                         and not any(c in S for S in runner(e2, v)), CANDIDATE_MONOTONICITY)
                return AxiomVerdict(CANDIDATE_MONOTONICITY, False,
                                    {"candidate": c, "ballot_index": i, "perturbed": e2,
                                     "finals_before": sorted(finals), "finals_after": sorted(after)},
                                    {"vector": v.sizes, "checked": checked, "skipped_noop": skipped})
    return AxiomVerdict(CANDIDATE_MONOTONICITY, True, None,
                        {"vector": v.sizes, "checked": checked, "skipped_noop": skipped})


# consistency

def check_consistency(runner, e1: Election, e2: Election, v) -> AxiomVerdict:
    if e1.candidates != e2.candidates:
        raise VotingError("consistency needs elections over the same candidate set")
    runner = RuleRunner.of(runner)
    v = StageVector.of(v)
    r1, r2 = runner(e1, v), runner(e2, v)
    common = r1 & r2
    meta = {"vector": v.sizes}
    if not common:
        return AxiomVerdict(CONSISTENCY, True, None, dict(meta, vacuous=True))
    union = runner(e1 + e2, v)
    if union != common:
        _certify(runner(e1 + e2, v) != (runner(e1, v) & runner(e2, v)), CONSISTENCY)
        return AxiomVerdict(CONSISTENCY, False,
                            {"first": sorted(r1), "second": sorted(r2),
                             "intersection": sorted(common), "union": sorted(union)}, meta)
    return AxiomVerdict(CONSISTENCY, True, None, dict(meta, vacuous=False))


# justified representation

def check_justified_representation(profile: Election, S, k: int, ceiling: bool = False) -> AxiomVerdict:
    """Per-candidate scan: enough unrepresented voters all approving one candidate."""
    if not profile.is_approval:
        raise VotingError("justified representation is defined for approval profiles")
    S = frozenset(S)
    if len(S) != k:
        raise VotingError(f"committee {sorted(S)} is not of size {k}")
    threshold = quota(profile.n, k, ceiling)
    for c in range(profile.m):
        group = [i for i, b in enumerate(profile.ballots) if c in b.approved and not (b.approved & S)]
        weight = sum(profile.ballots[i].weight for i in group)
        if group and weight >= threshold:
            return AxiomVerdict(JUSTIFIED_REPRESENTATION, False,
                                {"candidate": c, "voters": group, "weight": weight,
                                 "committee": committee(S), "threshold": threshold})
    return AxiomVerdict(JUSTIFIED_REPRESENTATION, True, None, {"committee": committee(S)})


def check_outputs_jr(runner, e: Election, v, ceiling: bool = False) -> AxiomVerdict:
    runner = RuleRunner.of(runner)
    v = StageVector.of(v)
    for S in sorted(runner(e, v)):
        verdict = check_justified_representation(e, S, v.last, ceiling)
        if not verdict.holds:
            return verdict
    return AxiomVerdict(JUSTIFIED_REPRESENTATION, True, None, {"vector": v.sizes})


# Pareto efficiency

def dominates(profile: Election, better, worse) -> bool:
    better, worse = frozenset(better), frozenset(worse)
    strict = False
    for b in profile.ballots:
        x, y = len(b.approved & better), len(b.approved & worse)
        if x < y:
            return False
        strict = strict or x > y
    return strict


def check_pareto_efficiency(profile: Election, S, k: int, cap: int | None = None) -> AxiomVerdict:
    if not profile.is_approval:
        raise VotingError("Pareto efficiency is only considered for approval profiles")
    if len(set(S)) != k:
        raise VotingError(f"committee {sorted(S)} is not of size {k}")
    count = math.comb(profile.m, k)
    limit = enum_cap(cap)
    if count > limit:
        raise CapExceeded("committee enumeration", count, limit, m=profile.m, k=k)
    for other in itertools.combinations(range(profile.m), k):
        if dominates(profile, other, S):
            return AxiomVerdict(PARETO_EFFICIENCY, False,
                                {"committee": committee(S), "dominating": other})
    return AxiomVerdict(PARETO_EFFICIENCY, True, None, {"committee": committee(S)})


def check_outputs_pareto(runner, e: Election, v) -> AxiomVerdict:
    runner = RuleRunner.of(runner)
    v = StageVector.of(v)
    for S in sorted(runner(e, v)):
        verdict = check_pareto_efficiency(e, S, v.last)
        if not verdict.holds:
            return verdict
    return AxiomVerdict(PARETO_EFFICIENCY, True, None, {"vector": v.sizes})


# randomized search

@dataclass(frozen=True)
class SearchConfig:
    min_m: int = 3
    max_m: int = 4
    min_n: int = 1
    max_n: int = 6
    stages: int | None = None  # defaults to the number of per-stage descriptors
    approval_p: float = 0.5

    def __post_init__(self):
        if not 2 <= self.min_m <= self.max_m or not 1 <= self.min_n <= self.max_n:
            raise VotingError(f"invalid generator bounds {self}")
        if self.stages is not None and self.stages < 1:
            raise VotingError("stages must be >= 1")


def _trial(axiom, runner, cfg, t, rng):
    m = rng.randint(max(cfg.min_m, t + 1), max(cfg.max_m, t + 1))
    draw = ((lambda: random_approval(rng, m, rng.randint(cfg.min_n, cfg.max_n), cfg.approval_p))
            if runner.is_approval else (lambda: random_ranked(rng, m, rng.randint(cfg.min_n, cfg.max_n))))
    e = draw()
    v = random_vector(rng, m, t)
    if axiom == SOLID_COALITION:
        return e, v, check_solid_coalition(runner, e, v)
    if axiom == CANDIDATE_MONOTONICITY:
        return e, v, check_candidate_monotonicity(runner, e, v)
    if axiom == CONSISTENCY:
        e2 = draw()
        return (e, e2), v, check_consistency(runner, e, e2, v)
    if axiom == COMMITTEE_MONOTONICITY:
        v2 = random_vector(rng, m, t, last=v[-1] + 1)
        if v2 is None:
            return None
        return e, (v, v2), check_committee_monotonicity(runner, e, v, v2)
    if axiom == JUSTIFIED_REPRESENTATION:
        return e, v, check_outputs_jr(runner, e, v)
    if axiom == PARETO_EFFICIENCY:
        return e, v, check_outputs_pareto(runner, e, v)
    raise VotingError(f"unknown axiom {axiom!r}")


def search_violation(axiom: str, rule, gen: SearchConfig | None = None, seed: int = 0,
                     budget: int = 1000):
    """First violating random instance, or None when the budget runs out.

    Trial ``i`` draws from ``random.Random(seed + i)``, so the first witness
    is the one with the lowest trial index.
    """
    if axiom not in AXIOMS:
        raise VotingError(f"unknown axiom {axiom!r}")
    gen = gen or SearchConfig()
    runner = RuleRunner.of(rule)
    ranked_only = axiom in (SOLID_COALITION,)
    approval_only = axiom in (JUSTIFIED_REPRESENTATION, PARETO_EFFICIENCY)
    if (ranked_only and runner.is_approval) or (approval_only and not runner.is_approval):
        raise VotingError(f"{axiom} does not apply to rule {runner}")
    t = gen.stages or len(runner.rules)
    for i in range(budget):
        out = _trial(axiom, runner, gen, t, random.Random(seed + i))
        if out is None:
            continue
        election, vector, verdict = out
        if not verdict.holds:
            return {"trial": i, "seed": seed + i, "election": election, "vector": vector,
                    "verdict": verdict}
    return None
