"""Multi-stage execution: each stage's winning committee is the next stage's pool.

The irresolute engine explores every trajectory breadth-first, deduplicating
intermediate pools, and keeps one witnessing trajectory per reachable pool.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    DEFAULT_FRONTIER_CAP,
    Election,
    StageVector,
    VotingError,
    committee,
)
from .score_rules import BORDA, L1, PLU, ScoreRule


@dataclass(frozen=True)
class Trajectory:
    sets: tuple  # (S_0, S_1, ..., S_t), each a sorted tuple

    @property
    def final(self) -> tuple:
        return self.sets[-1]


@dataclass(frozen=True)
class MultiStageResult:
    finals: frozenset
    trajectories: dict = field(default_factory=dict, compare=False)
    truncated: bool = False

    def sorted_finals(self) -> list:
        return sorted(self.finals)

    def members(self) -> frozenset:
        """Candidates appearing in at least one final committee."""
        return frozenset(c for S in self.finals for c in S)


def stage_rules(rules, t: int) -> tuple:
    """Normalise a single rule or a per-stage sequence to exactly ``t`` rules."""
    if not isinstance(rules, (list, tuple)):
        return (rules,) * t
    if len(rules) == 1:
        return tuple(rules) * t
    if len(rules) != t:
        raise VotingError(f"{len(rules)} stage rules for a {t}-stage vector")
    return tuple(rules)


def _check_profile(rules, e: Election) -> None:
    for rule in rules:
        if isinstance(rule, ScoreRule) and not e.is_ranked:
            raise VotingError("score-based stages need ranked ballots")


def run_multistage(rules, e: Election, v, frontier_cap: int = DEFAULT_FRONTIER_CAP,
                   cap: int | None = None) -> MultiStageResult:
    """All final committees reachable through some sequence of stage winners."""
    v = StageVector.of(v)
    v.validate(e.m)
    rules = stage_rules(rules, v.t)
    _check_profile(rules, e)
    start = tuple(range(e.m))
    frontier = {start: (start,)}
    truncated = False
    for rule, k in zip(rules, v.sizes):
        nxt = {}
        for pool in sorted(frontier):
            path = frontier[pool]
            if k == len(pool):  # identity stage (relaxed vectors only)
                winners = (pool,)
            else:
                winners = rule.stage_winners(e, pool, k, cap).committees
            for S in winners:
                if S not in nxt:
                    nxt[S] = path + (S,)
        if len(nxt) > frontier_cap:
            truncated = True
            nxt = {S: nxt[S] for S in sorted(nxt)[:frontier_cap]}
        frontier = nxt
    trajectories = {S: Trajectory(path) for S, path in frontier.items()}
    return MultiStageResult(frozenset(frontier), trajectories, truncated)


def run_deterministic(rules, e: Election, v, cap: int | None = None) -> tuple:
    """Resolute run: the lexicographically smallest winner at every stage.

    Returns ``(final committee, Trajectory)``.
    """
    v = StageVector.of(v)
    v.validate(e.m)
    rules = stage_rules(rules, v.t)
    _check_profile(rules, e)
    pool = tuple(range(e.m))
    path = [pool]
    for rule, k in zip(rules, v.sizes):
        if k != len(pool):
            pool = rule.stage_lexmin(e, pool, k, cap)
        path.append(pool)
    return pool, Trajectory(tuple(path))


def validate_trajectory(rules, e: Election, v, traj: Trajectory) -> bool:
    """Re-check that every step of ``traj`` is a fresh stage winner."""
    v = StageVector.of(v)
    rules = stage_rules(rules, v.t)
    if traj.sets[0] != tuple(range(e.m)) or len(traj.sets) != v.t + 1:
        return False
    for rule, k, prev, cur in zip(rules, v.sizes, traj.sets, traj.sets[1:]):
        if len(cur) != k or not set(cur) <= set(prev):
            return False
        if k == len(prev):
            if cur != prev:
                return False
        elif committee(cur) not in rule.stage_winners(e, prev, k).committees:
            return False
    return True


def _eliminate_one(m: int, gamma) -> tuple:
    if m < 2:
        raise VotingError(f"elimination presets need m >= 2, got {m}")
    rule = ScoreRule(L1, gamma)
    return (rule,) * (m - 1), StageVector(tuple(range(m - 1, 0, -1)))


def preset_stv(m: int) -> tuple:
    """Eliminate the plurality loser, one candidate per stage."""
    return _eliminate_one(m, PLU)


def preset_baldwin(m: int) -> tuple:
    """Eliminate the Borda loser, one candidate per stage."""
    return _eliminate_one(m, BORDA)

