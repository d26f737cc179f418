"""Exact multi-stage multi-winner voting: rules, axioms, counter-examples, simulation."""

from .core import (
    ApprovalBallot,
    CapExceeded,
    Election,
    ElectionFormatError,
    RankedBallot,
    StageVector,
    VotingError,
    all_permutations,
    approval_election,
    cycle,
    first_place_count,
    load_election,
    parse_election,
    ranked_election,
    restrict_ballot,
    serialize_election,
)
from .multistage import preset_baldwin, preset_stv, run_deterministic, run_multistage
from .rules import RuleRunner, parse_rule, parse_rules
from .score_rules import (
    APP,
    BORDA,
    PLU,
    PositionScoreFamily,
    ScoreRule,
    is_rational_rule,
    single_stage_winners,
    total_score,
    voter_committee_score,
)
from .thiele import ACC, AV, PAV, OmegaFunction, ThieleRule, is_linear_omega, thiele_score, thiele_winners

__version__ = "0.1.0"
