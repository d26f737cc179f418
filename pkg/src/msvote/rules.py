"""Rule descriptors and the runner abstraction used by the axiom checkers.

Descriptor grammar::

    l1:plu | l1:app | l1:borda | lmax:<gamma> | <beta>:table:<file>
    thiele:av | thiele:pav | thiele:acc | thiele:table:<file>

Several descriptors joined by ``;`` give one rule per stage; a single
descriptor applies to every stage.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DEFAULT_FRONTIER_CAP, Election, StageVector, VotingError
from .multistage import run_deterministic, run_multistage, stage_rules
from .score_rules import L1, LMAX, PRESETS, PositionScoreFamily, ScoreRule, load_gamma_table
from .thiele import OMEGA_PRESETS, OmegaFunction, ThieleRule, load_omega_table


def parse_rule(desc: str):
    head, _, rest = desc.strip().partition(":")
    if not rest:
        raise VotingError(f"bad rule descriptor {desc!r}")
    if head == "thiele":
        if rest.startswith("table:"):
            return ThieleRule(load_omega_table(rest[len("table:"):]))
        if rest not in OMEGA_PRESETS:
            raise VotingError(f"unknown Thiele rule {rest!r}")
        return ThieleRule(OMEGA_PRESETS[rest])
    if head not in (L1, LMAX):
        raise VotingError(f"unknown norm {head!r} in {desc!r}")
    if rest.startswith("table:"):
        return ScoreRule(head, load_gamma_table(rest[len("table:"):]))
    if rest not in PRESETS:
        raise VotingError(f"unknown position scores {rest!r}")
    return ScoreRule(head, PRESETS[rest])


def parse_rules(desc: str) -> tuple:
    parts = [p for p in desc.split(";") if p.strip()]
    if not parts:
        raise VotingError("empty rule descriptor")
    return tuple(parse_rule(p) for p in parts)


def as_rule(obj):
    """Accept a descriptor, a gamma family (as l1), an omega, or a rule object."""
    if isinstance(obj, str):
        rules = parse_rules(obj)
        return rules[0] if len(rules) == 1 else rules
    if isinstance(obj, OmegaFunction):
        return ThieleRule(obj)
    if isinstance(obj, PositionScoreFamily):
        return ScoreRule(L1, obj)
    return obj


@dataclass(frozen=True)
class RuleRunner:
    """Maps ``(election, vector or k)`` to the set of final committees."""

    rules: tuple
    frontier_cap: int = DEFAULT_FRONTIER_CAP

    @classmethod
    def of(cls, obj) -> "RuleRunner":
        if isinstance(obj, RuleRunner):
            return obj
        rule = as_rule(obj)
        return cls(rule if isinstance(rule, tuple) else (rule,))

    @property
    def is_approval(self) -> bool:
        return isinstance(self.rules[0], ThieleRule)

    def __call__(self, e: Election, v) -> frozenset:
        return self.run(e, v).finals

    def run(self, e: Election, v):
        v = StageVector.of(v)
        return run_multistage(stage_rules(self.rules, v.t), e, v, frontier_cap=self.frontier_cap)

    def deterministic(self, e: Election, v):
        v = StageVector.of(v)
        return run_deterministic(stage_rules(self.rules, v.t), e, v)

    def __str__(self):
        return ";".join(str(r) for r in self.rules)
