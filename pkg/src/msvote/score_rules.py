"""Single-stage score-based (beta, gamma) rules over ranked ballots.

A voter scores a committee either by summing the position scores of its
members (``l1``) or by taking the best member's position score (``lmax``).
All arithmetic is exact: position-score vectors are rescaled to integers by
their common denominator before accumulation, and divided back out at the end.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import (
    CapExceeded,
    Election,
    RankedBallot,
    VotingError,
    committee,
    enum_cap,
    restricted_profile,
)

L1 = "l1"
LMAX = "lmax"


@dataclass(eq=False)
class PositionScoreFamily:
    """Position scores ``gamma(m, k, p)`` for every pool size and target size.

    Either ``fn`` gives a closed form, or ``table`` maps ``(m, k)`` to the
    explicit vector ``(gamma(1), ..., gamma(m))``; missing table entries fall
    back to ``fallback`` when one is given.
    """

    name: str
    fn: Callable | None = None
    table: dict = field(default_factory=dict)
    fallback: "PositionScoreFamily | None" = None
    _cache: dict = field(default_factory=dict, repr=False)

    def vector(self, m: int, k: int) -> tuple:
        key = (m, k)
        if key not in self._cache:
            if key in self.table:
                vec = tuple(Fraction(x) for x in self.table[key])
                if len(vec) != m:
                    raise VotingError(f"gamma table for {key} has {len(vec)} entries, expected {m}")
            elif self.fn is not None:
                vec = tuple(Fraction(self.fn(m, k, p)) for p in range(1, m + 1))
            elif self.fallback is not None:
                vec = self.fallback.vector(m, k)
            else:
                raise VotingError(f"position scores {self.name!r} undefined for (m={m}, k={k})")
            if any(a < b for a, b in zip(vec, vec[1:])):
                raise VotingError(f"position scores {self.name!r} increase for (m={m}, k={k}): {vec}")
            self._cache[key] = vec
        return self._cache[key]

    def __call__(self, m: int, k: int, p: int) -> Fraction:
        if not 1 <= p <= m:
            raise VotingError(f"position {p} outside [1, {m}]")
        return self.vector(m, k)[p - 1]

    def int_vector(self, m: int, k: int) -> tuple:
        """``(ints, scale)`` with ``ints[i] == gamma(i+1) * scale``."""
        vec = self.vector(m, k)
        scale = math.lcm(*(x.denominator for x in vec))
        return tuple(int(x * scale) for x in vec), scale


PLU = PositionScoreFamily("plu", lambda m, k, p: 1 if p == 1 else 0)
APP = PositionScoreFamily("app", lambda m, k, p: 1 if p <= k else 0)
BORDA = PositionScoreFamily("borda", lambda m, k, p: m - p)

PRESETS = {"plu": PLU, "app": APP, "borda": BORDA}


def load_gamma_table(path) -> PositionScoreFamily:
    """Read a rational position-score table.

    Format: ``{"name": str, "fallback": "borda" | null,
    "entries": {"m,k": ["num/den", ...]}}``.
    """
    with open(path) as fh:
        doc = json.load(fh)
    return gamma_table_from_dict(doc, default_name=str(path))


def gamma_table_from_dict(doc: dict, default_name: str = "table") -> PositionScoreFamily:
    table = {}
    for key, values in doc.get("entries", {}).items():
        m, k = (int(x) for x in key.split(","))
        table[(m, k)] = tuple(Fraction(v) for v in values)
    fallback = doc.get("fallback")
    if fallback is not None and fallback not in PRESETS:
        raise VotingError(f"unknown fallback position scores {fallback!r}")
    fam = PositionScoreFamily(doc.get("name", default_name), table=table,
                              fallback=PRESETS.get(fallback) if fallback else None)
    for m, k in table:
        fam.vector(m, k)  # checks monotonicity at load time
    return fam


@dataclass(frozen=True)
class ScoreRule:
    beta: str
    gamma: PositionScoreFamily

    def __post_init__(self):
        if self.beta not in (L1, LMAX):
            raise VotingError(f"unknown norm {self.beta!r}")

    def __str__(self):
        return f"{self.beta}:{self.gamma.name}"

    # stage interface used by the multi-stage engine
    def stage_winners(self, e: Election, pool, k: int, cap: int | None = None) -> "WinnerSet":
        return _pool_winners(self, e, pool, k, cap)

    def stage_lexmin(self, e: Election, pool, k: int, cap: int | None = None) -> tuple:
        return _pool_lexmin(self, e, pool, k, cap)


@dataclass(frozen=True)
class WinnerSet:
    committees: tuple
    max_score: Fraction

    def __contains__(self, s) -> bool:
        return committee(s) in self.committees

    def __iter__(self):
        return iter(self.committees)

    def __len__(self):
        return len(self.committees)


def voter_committee_score(rule: ScoreRule, m: int, k: int, b: RankedBallot, S) -> Fraction:
    """Unweighted score ``f_v(S)`` for a ballot over a pool of ``m`` candidates."""
    S = set(S)
    if len(S) != k:
        raise VotingError(f"committee {sorted(S)} is not of size {k}")
    if len(b.ranking) != m:
        raise VotingError(f"ballot ranks {len(b.ranking)} candidates, expected {m}")
    if not S <= set(b.ranking):
        raise VotingError(f"committee {sorted(S)} outside the ballot's candidate pool")
    vals = [rule.gamma(m, k, b.position(c)) for c in S]
    return sum(vals, Fraction(0)) if rule.beta == L1 else max(vals)


def total_score(rule: ScoreRule, e: Election, k: int, S) -> Fraction:
    if not e.is_ranked:
        raise VotingError("score-based rules need ranked ballots")
    return sum((b.weight * voter_committee_score(rule, e.m, k, b, S) for b in e.ballots), Fraction(0))


def _check_k(m: int, k: int) -> None:
    if not 1 <= k < m:
        raise VotingError(f"committee size k={k} must satisfy 1 <= k < m={m}")


def single_stage_winners(rule: ScoreRule, e: Election, k: int, cap: int | None = None) -> WinnerSet:
    """All size-``k`` committees of maximum total score."""
    if not e.is_ranked:
        raise VotingError("score-based rules need ranked ballots")
    _check_k(e.m, k)
    return _pool_winners(rule, e, tuple(range(e.m)), k, cap)


def is_rational_rule(rule: ScoreRule, m: int, k: int) -> bool:
    _check_k(m, k)
    vec = rule.gamma.vector(m, k)
    low = vec[m - 1] if rule.beta == L1 else vec[m - k]
    return vec[0] > low


# exact winner computation

def _candidate_totals(profile, vec) -> dict:
    totals = {}
    for ranking, w in profile:
        for pos, c in enumerate(ranking):
            totals[c] = totals.get(c, 0) + w * vec[pos]
    return totals


def _l1_structure(rule, e, pool, k):
    """Committee-score structure for separable scoring.

    Returns ``(must, tied, r, best, scale)``: every winner is ``must`` plus
    any ``r`` members of ``tied``, scoring ``best / scale``.
    """
    pool = tuple(sorted(pool))
    vec, scale = rule.gamma.int_vector(len(pool), k)
    totals = _candidate_totals(restricted_profile(e, pool), vec)
    for c in pool:
        totals.setdefault(c, 0)
    ordered = sorted(pool, key=lambda c: -totals[c])
    threshold = totals[ordered[k - 1]]
    must = tuple(c for c in pool if totals[c] > threshold)
    tied = tuple(c for c in pool if totals[c] == threshold)
    best = sum(totals[c] for c in ordered[:k])
    return must, tied, k - len(must), best, scale


def _lmax_scores(rule, e, pool, k, cap):
    pool = tuple(sorted(pool))
    n_committees = math.comb(len(pool), k)
    limit = enum_cap(cap)
    if n_committees > limit:
        raise CapExceeded("committee enumeration", n_committees, limit, m=len(pool), k=k)
    vec, scale = rule.gamma.int_vector(len(pool), k)
    profile = restricted_profile(e, pool)
    # per ballot: candidate -> integer position score
    rows = [({c: vec[pos] for pos, c in enumerate(ranking)}, w) for ranking, w in profile]
    scores = {}
    for S in itertools.combinations(pool, k):
        scores[S] = sum(w * max(row[c] for c in S) for row, w in rows)
    return scores, scale


def _pool_winners(rule, e, pool, k, cap=None) -> WinnerSet:
    if rule.beta == L1:
        must, tied, r, best, scale = _l1_structure(rule, e, pool, k)
        count = math.comb(len(tied), r)
        limit = enum_cap(cap)
        if count > limit:
            raise CapExceeded("tied winner set", count, limit, m=len(tuple(pool)), k=k)
        committees = sorted(committee(must + extra) for extra in itertools.combinations(tied, r))
        return WinnerSet(tuple(committees), Fraction(best, scale))
    scores, scale = _lmax_scores(rule, e, pool, k, cap)
    best = max(scores.values())
    return WinnerSet(tuple(sorted(S for S, v in scores.items() if v == best)), Fraction(best, scale))


def _pool_lexmin(rule, e, pool, k, cap=None) -> tuple:
    if rule.beta == L1:
        must, tied, r, _, _ = _l1_structure(rule, e, pool, k)
        return committee(must + tied[:r])
    scores, _ = _lmax_scores(rule, e, pool, k, cap)
    best = max(scores.values())
    return min(S for S, v in scores.items() if v == best)
