"""Rebuild the counter-example elections and check their claimed outcomes.

Each scenario is materialised exactly (groups, multiplicities, dummy
candidates, stage vectors) and verified through the generic axiom checkers,
so a passing report cross-validates the rule engines and the checkers.

Score-based ids: T2_L1_A, T2_L1_B, T2_LMAX, T3, T4_1, T4_2, T4_3.
Approval ids:    A_LEM1_1, A_LEM1_2, A_CM_1, A_CM_2, A_CONS_1, A_CONS_2, A_PE.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import axioms
from .core import (
    Election,
    StageVector,
    VotingError,
    all_permutations,
    approval_election,
    committee,
    cycles,
    ranked_election,
)
from .rules import RuleRunner, as_rule
from .score_rules import L1, LMAX, ScoreRule, is_rational_rule, total_score
from .thiele import ThieleRule, first_nonlinear_index


class BranchPreconditionError(VotingError):
    """The supplied rule does not satisfy the construction's inequality."""


class NoRatioFound(VotingError):
    pass


# integer ratios

_OPS = {"<": operator.lt, "<=": operator.le, "==": operator.eq, ">=": operator.ge, ">": operator.gt}


@dataclass(frozen=True)
class Ratio:
    """``n[num] / n[den]  op  value``."""

    num: int
    den: int
    op: str
    value: Fraction

    def __call__(self, n: Sequence[int]) -> bool:
        return _OPS[self.op](Fraction(n[self.num], n[self.den]), Fraction(self.value))


def _compositions(total: int, parts: int, low: int):
    if parts == 1:
        if total >= low:
            yield (total,)
        return
    for first in range(low, total - low * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, low):
            yield (first,) + rest


def derive_integer_ratio(constraints: Sequence[Callable], n_vars: int = 2, minimum: int = 1,
                         bound: int = 10_000) -> tuple:
    """Smallest positive integers (by sum, then lexicographically) meeting every constraint.

    ``constraints`` are predicates on the tuple ``(n1, n2[, n3])``; ``Ratio``
    covers rational comparisons, plain lambdas cover integer side conditions.
    ``bound`` caps the sum searched.
    """
    for total in range(n_vars * minimum, bound + 1):
        for n in _compositions(total, n_vars, minimum):
            if all(check(n) for check in constraints):
                return n
    raise NoRatioFound(f"no integer solution with sum <= {bound}")


# scenario containers

@dataclass(frozen=True)
class Scenario:
    id: str
    rule: object
    elections: dict
    vectors: dict
    expectation: dict
    perturbation: dict | None = None
    params: dict = field(default_factory=dict)

    def labels(self, committees) -> list:
        e = next(iter(self.elections.values()))
        return [e.labels(S) for S in sorted(committees)]


@dataclass(frozen=True)
class TheoremReport:
    id: str
    passed: bool
    computed: dict

    def to_json(self) -> dict:
        return {"id": self.id, "pass": self.passed, "computed": _jsonable(self.computed)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


SCENARIOS = {
    "T2_L1_A": "two-stage l1 rules lose committee monotonicity, branch gamma^{4,2}(1) > gamma^{4,2}(3)",
    "T2_L1_B": "two-stage l1 rules lose committee monotonicity, branch gamma^{4,2}(2) > gamma^{4,2}(4)",
    "T2_LMAX": "two-stage lmax rules lose committee monotonicity (seven candidates, permutation groups)",
    "T3": "rational multi-stage score rules lose candidate monotonicity (three-candidate cycle)",
    "T4_1": "rational multi-stage score rules lose consistency, branch gamma^{4,1}(1) > gamma^{4,1}(2)",
    "T4_2": "rational multi-stage score rules lose consistency, branch gamma^{4,1}(2) > gamma^{4,1}(3)",
    "T4_3": "rational multi-stage score rules lose consistency, branch gamma^{4,1}(3) > gamma^{4,1}(4)",
    "A_LEM1_1": "single-stage Thiele with omega increments p_i0 < p_1 is not committee monotone",
    "A_LEM1_2": "single-stage Thiele with omega increments p_i0 > p_1 is not committee monotone",
    "A_CM_1": "multi-stage Thiele loses candidate monotonicity when p_i0 < p_(i0-1)",
    "A_CM_2": "multi-stage Thiele loses candidate monotonicity when p_i0 > p_(i0-1)",
    "A_CONS_1": "multi-stage Thiele loses consistency when p_i0 < p_1",
    "A_CONS_2": "multi-stage Thiele loses consistency when p_i0 > p_1",
    "A_PE": "multi-stage Thiele outputs a Pareto-dominated committee when p_(i0-1) > p_i0",
}


# score-based constructions

def _score_rule(rule, beta=None) -> ScoreRule:
    rule = as_rule(rule)
    if not isinstance(rule, ScoreRule):
        raise BranchPreconditionError(f"{rule} is not a score-based rule")
    if beta is not None and rule.beta != beta:
        raise BranchPreconditionError(f"construction needs beta={beta}, got {rule.beta}")
    return rule


def _require_rational(rule: ScoreRule, pairs) -> None:
    for m, k in pairs:
        if not is_rational_rule(rule, m, k):
            raise BranchPreconditionError(f"{rule} is not rational at (m={m}, k={k})")


def _gamma(rule, m, k, p):
    return rule.gamma(m, k, p)


def _perm_group(weight, items, suffix=(), prefix=()):
    return [(weight, list(prefix) + list(p) + list(suffix)) for p in all_permutations(items)]


def _vector_pairs(m: int, v: Sequence[int]) -> list:
    pools = (m,) + tuple(v[:-1])
    return [(p, k) for p, k in zip(pools, v) if k < p]


def _build_t2_l1(rule, branch: str) -> Scenario:
    rule = _score_rule(rule, L1)
    _require_rational(rule, _vector_pairs(5, (4, 2)) + _vector_pairs(5, (2, 1)))
    g = lambda p: _gamma(rule, 4, 2, p)  # noqa: E731
    if branch == "A" and not g(1) > g(3):
        raise BranchPreconditionError(f"{rule}: gamma^(4,2)(1) > gamma^(4,2)(3) fails")
    if branch == "B" and not g(2) > g(4):
        raise BranchPreconditionError(f"{rule}: gamma^(4,2)(2) > gamma^(4,2)(4) fails")
    front = ["d"] if branch == "B" else []
    back = [] if branch == "B" else ["d"]
    groups = []
    for core in ("bcae", "cbae"):
        groups += [(1, front + list(s) + back) for s in cycles(core)]
    for core in ("abcd", "acbd"):
        groups += [(1, list(s) + ["e"]) for s in cycles(core)]
    groups += _perm_group(200, "abcd", suffix="e")
    groups += _perm_group(100, "abce", suffix="d")
    e = ranked_election("abcde", groups)
    return Scenario(
        f"T2_L1_{branch}", rule, {"E": e},
        {"v1": StageVector((4, 2)), "v2": StageVector((2, 1))},
        {"finals_v1": [("b", "c")], "finals_v2_contains": ("a",)},
        params={"branch": branch},
    )


T2_GROUP5 = (
    "fbdecga", "fcdebga", "fbdeagc", "fcdeagb",
    "dafgbec", "dafgceb", "dfbecag", "dfcebag",
    "deafbcg", "deafcbg", "dfbeacg", "dfceabg",
)


def _build_t2_lmax(rule) -> Scenario:
    rule = _score_rule(rule, LMAX)
    _require_rational(rule, _vector_pairs(7, (2, 1)) + _vector_pairs(7, (5, 2)))
    labels = "abcdefg"
    groups = []
    for weight, last in ((200, "g"), (200, "f"), (100, "e"), (100, "d")):
        groups += _perm_group(weight, [x for x in labels if x != last], suffix=last)
    groups += [(1, list(s)) for s in T2_GROUP5]
    return Scenario(
        "T2_LMAX", rule, {"E": ranked_election(labels, groups)},
        {"v1": StageVector((2, 1)), "v2": StageVector((5, 2))},
        {"finals_v2": [("b", "c")], "finals_v1_contains": ("a",)},
    )


def _build_t3(rule, k_final: int = 1, stages: int = 2) -> Scenario:
    rule = _score_rule(rule)
    if k_final < 1 or stages < 2:
        raise VotingError("T3 needs k_final >= 1 and at least two stages")
    front = [f"p{i}" for i in range(1, k_final)]
    back = [f"z{i}" for i in range(1, stages - 1)]
    labels = front + ["a", "b", "c"] + back
    m = len(labels)
    vector = tuple(range(m - 1, k_final - 1, -1))
    pairs = _vector_pairs(m, vector)
    _require_rational(rule, pairs)
    if front or back:
        # dummies only stay inert when every used position score is strictly decreasing
        for pm, pk in pairs:
            vec = rule.gamma.vector(pm, pk)
            if rule.beta != L1 or any(x <= y for x, y in zip(vec, vec[1:])):
                raise BranchPreconditionError(
                    f"{rule}: padded T3 needs l1 with strictly decreasing gamma at (m={pm}, k={pk})")
    pm = k_final + 2  # pool before the second-to-last stage
    g = lambda p: _gamma(rule, pm, pm - 1, p)  # noqa: E731
    if g(k_final) > g(k_final + 1):
        shifted = "bac"
    elif g(k_final + 1) > g(k_final + 2):
        shifted = "cba"
    else:
        raise BranchPreconditionError(f"{rule}: no strict drop among the three core positions")
    wrap = lambda core: front + list(core) + back  # noqa: E731
    groups = [(10, wrap(s)) for s in cycles("cab")]
    groups += [(1, wrap(p)) for p in all_permutations("abc")]
    before = ranked_election(labels, groups)
    index = next(i for i, (_, order) in enumerate(groups) if order == wrap(shifted))
    a = before.index("a")
    order = list(before.ballots[index].ranking)
    pos = order.index(a)
    order[pos - 1], order[pos] = order[pos], order[pos - 1]
    after_groups = list(groups)
    after_groups[index] = (1, [labels[c] for c in order])
    after = ranked_election(labels, after_groups)
    return Scenario(
        "T3", rule, {"E": before, "E_shifted": after}, {"v": StageVector(vector)},
        {"before_contains": ("a",), "after_finals": [tuple(front + ["c"])]},
        perturbation={"ballot_index": index, "candidate": "a", "ballot": "".join(shifted)},
        params={"k_final": k_final, "stages": stages},
    )


def _build_t4(rule, j: int) -> Scenario:
    rule = _score_rule(rule)
    _require_rational(rule, _vector_pairs(5, (4, 1)))
    if not _gamma(rule, 4, 1, j) > _gamma(rule, 4, 1, j + 1):
        raise BranchPreconditionError(f"{rule}: gamma^(4,1)({j}) > gamma^(4,1)({j + 1}) fails")

    def place(spare, core, s):
        # the cycled core starts at position j; spare candidates fill the rest
        return list(spare[: j - 1]) + list(s) + list(spare[j - 1:])

    first, second = [], []
    for s1, s2, s3 in zip(cycles("abe"), cycles("bac"), cycles("abd")):
        first += [(1, place("cd", "abe", s1)), (1, place("de", "bac", s2))]
        second += [(1, place("ce", "abd", s3)), (1, place("de", "bac", s2))]
    for weight, last in ((300, "c"), (100, "d"), (400, "e")):
        first += _perm_group(weight, [x for x in "abcde" if x != last], suffix=last)
    for weight, last in ((300, "c"), (400, "d"), (100, "e")):
        second += _perm_group(weight, [x for x in "abcde" if x != last], suffix=last)
    return Scenario(
        f"T4_{j}", rule,
        {"V1": ranked_election("abcde", first), "V2": ranked_election("abcde", second)},
        {"v": StageVector((4, 1))},
        {"finals_V1": [("a",)], "finals_V2": [("a",)], "finals_union": [("b",)]},
        params={"branch": j},
    )


# approval constructions

def _thiele_rule(rule) -> ThieleRule:
    rule = as_rule(rule)
    if not isinstance(rule, ThieleRule):
        raise BranchPreconditionError(f"{rule} is not an omega-Thiele rule")
    for i in range(0, 8):
        try:
            if Fraction(rule.omega(i)) != rule.omega(i):
                raise BranchPreconditionError("omega must be rational")
        except VotingError:
            break
    return rule


def _increments(omega, upto):
    return {i: omega.increment(i) for i in range(1, upto + 1)}


def _resolve_i0(omega, i0):
    if i0 is None:
        i0 = first_nonlinear_index(omega)
        if i0 is None:
            raise BranchPreconditionError(f"omega {omega.name!r} is linear; no construction applies")
    if i0 < 2:
        raise BranchPreconditionError("i0 must be at least 2")
    return i0


def _names(prefix, count):
    return [f"{prefix}{i}" for i in range(1, count + 1)]


def _eliminate_one(m, last):
    return StageVector(tuple(range(m - 1, last - 1, -1)))


def _dummies(count):
    return [(1, {x}) for x in _names("e", count)]


def _build_lemma(rule, case: int, i0=None) -> Scenario:
    rule = _thiele_rule(rule)
    i0 = _resolve_i0(rule.omega, i0)
    p = _increments(rule.omega, i0)
    if any(p[i] != p[1] for i in range(2, i0)):
        raise BranchPreconditionError(f"i0={i0} is not the first index with p_i0 != p_1")
    if case == 1:
        if not p[i0] < p[1]:
            raise BranchPreconditionError(f"needs p_{i0} < p_1, got {p[i0]} vs {p[1]}")
        n1, n2 = derive_integer_ratio([Ratio(0, 1, ">", p[i0] / p[1]), Ratio(0, 1, "<", 1)])
        cs = _names("c", i0 - 1)
        labels = ["a", "b"] + cs
        groups = [(n1, {"a"}), (n2, {"a", *cs}), (n1, {"b"}), (n2, {"b", *cs})]
        expect = {"small_finals": [tuple(cs)], "large_all_contain": ("a", "b")}
    else:
        if not p[i0] > p[1]:
            raise BranchPreconditionError(f"needs p_{i0} > p_1, got {p[i0]} vs {p[1]}")
        n1, n2 = derive_integer_ratio([Ratio(0, 1, "<", p[i0] / p[1]), Ratio(0, 1, ">", 1)])
        ds = _names("d", i0 - 2)
        labels = ["a", "b", "c"] + ds
        groups = [(n1, {"c", *ds}), (n2, {"a", "b", *ds})]
        expect = {"small_finals": [tuple(["c"] + ds)], "large_finals": [tuple(["a", "b"] + ds)]}
    return Scenario(
        f"A_LEM1_{case}", rule, {"E": approval_election(labels, groups)},
        {"v1": StageVector((i0 - 1,)), "v2": StageVector((i0,))}, expect,
        params={"i0": i0, "n": (n1, n2)},
    )


def _build_cm(rule, case: int, i0=None, stages: int = 2) -> Scenario:
    rule = _thiele_rule(rule)
    i0 = _resolve_i0(rule.omega, i0)
    p = _increments(rule.omega, i0)
    if p[i0 - 1] == 0 or p[i0] == p[i0 - 1]:
        raise BranchPreconditionError(f"needs 0 != p_{i0 - 1} != p_{i0}")
    if p[i0] == 0:
        raise BranchPreconditionError(f"needs p_{i0} > 0 for a finite ratio")
    ds = _names("d", i0 - 2)
    es = _names("e", stages - 2)
    labels = ["a", "b", "c"] + ds + es
    target = Ratio(0, 1, "==", p[i0 - 1] / p[i0])
    if case == 1:
        if not p[i0] < p[i0 - 1]:
            raise BranchPreconditionError(f"needs p_{i0} < p_{i0 - 1}")
        n1, n2 = derive_integer_ratio([target, lambda n: n[0] - n[1] > 1])
        groups = [(n1, {"a", "c", *ds}), (n1, {"b", "c", *ds}), (n2, {"a", *ds}), (n2, {"b", *ds})]
        source = {"a", *ds}
    else:
        if not p[i0] > p[i0 - 1]:
            raise BranchPreconditionError(f"needs p_{i0} > p_{i0 - 1}")
        n1, n2 = derive_integer_ratio([target, lambda n: n[1] - n[0] > 1])
        groups = [(n1, {"a", "b", *ds}), (n2, {"c", *ds})]
        source = {"c", *ds}
    groups += _dummies(stages - 2)
    before = approval_election(labels, groups)
    index = next(i for i, (_, s) in enumerate(groups) if s == source)
    after_groups = list(groups)
    after_groups[index:index + 1] = [(groups[index][0] - 1, source), (1, source | {"b"})]
    after = approval_election(labels, after_groups)
    return Scenario(
        f"A_CM_{case}", rule, {"E": before, "E_perturbed": after},
        {"v": _eliminate_one(len(labels), i0 - 1)},
        {"before_contains": ("b",), "after_finals": [tuple(["c"] + ds)]},
        perturbation={"ballot_index": index, "candidate": "b"},
        params={"i0": i0, "n": (n1, n2), "stages": stages},
    )


def _build_cons(rule, case: int, i0=None, stages: int = 2) -> Scenario:
    rule = _thiele_rule(rule)
    i0 = _resolve_i0(rule.omega, i0)
    p = _increments(rule.omega, i0)
    if any(p[i] != p[1] for i in range(2, i0)) or p[i0] == p[1]:
        raise BranchPreconditionError(f"i0={i0} is not the first index with p_i0 != p_1")
    es = _names("e", stages - 2)
    if case == 1:
        if not p[i0] < p[1]:
            raise BranchPreconditionError(f"needs p_{i0} < p_1")
        n1, n2 = derive_integer_ratio(
            [Ratio(0, 1, ">", p[i0] / p[1]), Ratio(0, 1, "<", 1), lambda n: n[0] > 2])
        cs = _names("c", i0 - 1)
        labels = ["a", "b"] + cs + es
        first = [(n1, {"a"}), (n2, {"b", *cs})]
        second = [(n1, {"b"}), (n2, {"a", *cs})]
        shared = tuple(cs)
    else:
        if not p[i0] > p[1]:
            raise BranchPreconditionError(f"needs p_{i0} > p_1")
        n1, n2 = derive_integer_ratio(
            [Ratio(0, 1, "<", p[i0] / p[1]), Ratio(0, 1, ">", 1), lambda n: n[1] > 2])
        ds = _names("d", i0 - 2)
        labels = ["a", "b", "c"] + ds + es
        first = [(n1, {"b", *ds}), (n1, {"c", *ds}), (n2, {"a", "b", *ds}), (n2, {"a", "c", *ds})]
        second = [(n1, {"a", *ds}), (n1, {"c", *ds}), (n2, {"a", "b", *ds}), (n2, {"b", "c", *ds})]
        shared = tuple(["c"] + ds)
    first += _dummies(stages - 2)
    second += _dummies(stages - 2)
    return Scenario(
        f"A_CONS_{case}", rule,
        {"V1": approval_election(labels, first), "V2": approval_election(labels, second)},
        {"v": _eliminate_one(len(labels), i0 - 1)},
        {"intersection": [shared], "union_excludes": shared},
        params={"i0": i0, "n": (n1, n2), "stages": stages},
    )


def pareto_constraints(p, i0, loose: bool = False) -> list:
    """Ratio conditions for the Pareto construction.

    The default set is what makes ``a`` the cheapest removal in the
    second-to-last stage and ``d``/``e`` the cheapest in the last stage.
    ``loose=True`` gives a looser pair of ratio bounds (n1/n2 and n3/n2 only),
    kept to show that they do not force the violation.
    """
    above = [lambda n: min(n) > 1]
    if loose:
        return above + [Ratio(0, 1, "<=", (p[i0 - 1] - p[i0]) / p[i0]),
                        Ratio(2, 1, ">=", p[i0 - 1] / p[i0 + 1])]
    return above + [
        lambda n: n[0] * p[i0 - 1] + n[1] * p[i0] <= n[2] * p[i0 + 1],
        lambda n: n[2] * p[i0 + 1] < n[1] * p[i0 - 1],
    ]


def _build_pe(rule, i0=None, stages: int = 2, loose_constraints: bool = False, n=None) -> Scenario:
    rule = _thiele_rule(rule)
    if i0 is None:
        p = _increments(rule.omega, 16)
        i0 = next((i for i in range(2, 16) if p[i - 1] > p[i]), None)
        if i0 is None:
            raise BranchPreconditionError("omega has no strictly decreasing increment")
    p = _increments(rule.omega, i0 + 1)
    if i0 < 2 or not p[i0 - 1] > p[i0]:
        raise BranchPreconditionError(f"needs p_{i0 - 1} > p_{i0}")
    if p[i0 + 1] == 0:
        raise BranchPreconditionError(f"needs p_{i0 + 1} > 0")
    if n is None:
        n = derive_integer_ratio(pareto_constraints(p, i0, loose_constraints), n_vars=3)
    n1, n2, n3 = n
    fs = _names("f", i0 - 2)
    gs = _names("g", stages - 2)
    labels = ["a", "b", "c", "d", "e"] + fs + gs
    groups = [(n1, {"a", *fs}), (n2, {"a", "b", *fs}), (n2, {"a", "c", *fs}),
              (n3, {"b", "d", "e", *fs}), (n3, {"c", "d", "e", *fs})]
    groups += [(1, {x}) for x in gs]
    e = approval_election(labels, groups)
    return Scenario(
        "A_PE", rule, {"E": e}, {"v": _eliminate_one(len(labels), i0 + 1)},
        {"finals": [tuple(["b", "c", "d"] + fs), tuple(["b", "c", "e"] + fs)],
         "dominator": tuple(["a", "d", "e"] + fs)},
        params={"i0": i0, "n": (n1, n2, n3), "stages": stages, "loose_constraints": loose_constraints},
    )


def build(scenario_id: str, rule, **params) -> Scenario:
    """Materialise scenario ``scenario_id`` for ``rule`` (descriptor or rule object)."""
    builders = {
        "T2_L1_A": lambda: _build_t2_l1(rule, "A"),
        "T2_L1_B": lambda: _build_t2_l1(rule, "B"),
        "T2_LMAX": lambda: _build_t2_lmax(rule),
        "T3": lambda: _build_t3(rule, **params),
        "T4_1": lambda: _build_t4(rule, 1),
        "T4_2": lambda: _build_t4(rule, 2),
        "T4_3": lambda: _build_t4(rule, 3),
        "A_LEM1_1": lambda: _build_lemma(rule, 1, **params),
        "A_LEM1_2": lambda: _build_lemma(rule, 2, **params),
        "A_CM_1": lambda: _build_cm(rule, 1, **params),
        "A_CM_2": lambda: _build_cm(rule, 2, **params),
        "A_CONS_1": lambda: _build_cons(rule, 1, **params),
        "A_CONS_2": lambda: _build_cons(rule, 2, **params),
        "A_PE": lambda: _build_pe(rule, **params),
    }
    if scenario_id not in builders:
        raise VotingError(f"unknown scenario {scenario_id!r}; known: {', '.join(builders)}")
    return builders[scenario_id]()


# verification

def _idx(e: Election, names) -> tuple:
    return committee(e.index(x) for x in names)


def _named(e: Election, committees) -> list:
    return [tuple(e.labels(S)) for S in sorted(committees)]


def _verify_t2(s: Scenario, runner) -> tuple:
    e = s.elections["E"]
    v1, v2 = s.vectors["v1"], s.vectors["v2"]
    f1, f2 = runner(e, v1), runner(e, v2)
    verdict = axioms.check_committee_monotonicity(runner, e, v1, v2)
    computed = {"finals_v1": _named(e, f1), "finals_v2": _named(e, f2),
                "committee_monotonicity_holds": verdict.holds,
                "witness": _witness_names(e, verdict)}
    x = s.expectation
    if s.id == "T2_LMAX":
        ok = (_named(e, f2) == x["finals_v2"] and _idx(e, x["finals_v1_contains"]) in f1)
        rule = s.rule
        group5 = ranked_election("abcdefg", [(1, list(r)) for r in T2_GROUP5])
        inner = ranked_election("abcde", [(1, [c for c in r if c in "abcde"]) for r in T2_GROUP5])
        g7 = lambda p: rule.gamma(7, 2, p)  # noqa: E731
        g5 = lambda p: rule.gamma(5, 2, p)  # noqa: E731
        scores7 = {"".join(S): total_score(rule, group5, 2, _idx(group5, S)) for S in ("ab", "ac", "bc")}
        scores5 = {"".join(S): total_score(rule, inner, 2, _idx(inner, S)) for S in ("ab", "ac", "bc")}
        identities = {
            "stage1_ab": (scores7["ab"], 4 * (g7(2) + g7(3) + g7(4))),
            "stage1_ac": (scores7["ac"], 4 * (g7(2) + g7(3) + g7(5))),
            "stage1_bc": (scores7["bc"], 4 * (g7(2) + g7(3) + g7(5))),
            "stage2_ab": (scores5["ab"], 2 * g5(1) + 4 * g5(2) + 2 * g5(3) + 4 * g5(4)),
            "stage2_ac": (scores5["ac"], 2 * g5(1) + 4 * g5(2) + 2 * g5(3) + 4 * g5(4)),
            "stage2_bc": (scores5["bc"], 4 * g5(1) + 4 * g5(2) + 2 * g5(3) + 2 * g5(4)),
        }
        computed["group5_scores"] = {k: {"computed": a, "claimed": b, "equal": a == b}
                                     for k, (a, b) in identities.items()}
        # the conclusion only needs {a,b} to be at least as good as the other pairs
        computed["group5_ab_not_worse"] = scores7["ab"] >= max(scores7["ac"], scores7["bc"])
        ok = ok and computed["group5_ab_not_worse"]
    else:
        ok = (_named(e, f1) == x["finals_v1"] and _idx(e, x["finals_v2_contains"]) in f2)
    return ok and not verdict.holds, computed


def _witness_names(e: Election, verdict) -> dict | None:
    return axioms.verdict_to_json(verdict, e)["witness"]


def _verify_cm(s: Scenario, runner) -> tuple:
    """Shared by T3 and A_CM: named perturbation plus the generic checker."""
    e, e2 = next(iter(s.elections.values())), list(s.elections.values())[1]
    v = s.vectors["v"]
    before, after = runner(e, v), runner(e2, v)
    verdict = axioms.check_candidate_monotonicity(runner, e, v)
    x = s.expectation
    target = _idx(e, x["before_contains"])
    computed = {"finals_before": _named(e, before), "finals_after": _named(e, after),
                "candidate_monotonicity_holds": verdict.holds,
                "witness": _witness_names(e, verdict)}
    ok = (any(set(target) <= set(S) for S in before) and _named(e, after) == x["after_finals"]
          and not verdict.holds)
    return ok, computed


def _verify_cons(s: Scenario, runner) -> tuple:
    e1, e2 = s.elections["V1"], s.elections["V2"]
    v = s.vectors["v"]
    r1, r2, ru = runner(e1, v), runner(e2, v), runner(e1 + e2, v)
    verdict = axioms.check_consistency(runner, e1, e2, v)
    computed = {"finals_V1": _named(e1, r1), "finals_V2": _named(e1, r2),
                "finals_union": _named(e1, ru), "consistency_holds": verdict.holds}
    x = s.expectation
    if s.id.startswith("T4"):
        ok = (computed["finals_V1"] == x["finals_V1"] and computed["finals_V2"] == x["finals_V2"]
              and computed["finals_union"] == x["finals_union"])
    else:
        ok = (_named(e1, r1 & r2) == x["intersection"] and _idx(e1, x["union_excludes"]) not in ru)
    return ok and not verdict.holds, computed


def _verify_lemma(s: Scenario, runner) -> tuple:
    e = s.elections["E"]
    v1, v2 = s.vectors["v1"], s.vectors["v2"]
    f1, f2 = runner(e, v1), runner(e, v2)
    verdict = axioms.check_committee_monotonicity(runner, e, v1, v2)
    x = s.expectation
    computed = {"finals_small": _named(e, f1), "finals_large": _named(e, f2),
                "committee_monotonicity_holds": verdict.holds,
                "witness": _witness_names(e, verdict), "n": s.params["n"]}
    ok = _named(e, f1) == x["small_finals"]
    if "large_finals" in x:
        ok = ok and _named(e, f2) == x["large_finals"]
    else:
        need = set(_idx(e, x["large_all_contain"]))
        ok = ok and all(need <= set(S) for S in f2)
    return ok and not verdict.holds, computed


def _verify_pe(s: Scenario, runner) -> tuple:
    e = s.elections["E"]
    v = s.vectors["v"]
    finals = runner(e, v)
    dominator = _idx(e, s.expectation["dominator"])
    verdicts = {tuple(e.labels(S)): axioms.check_pareto_efficiency(e, S, v.last) for S in sorted(finals)}
    computed = {"finals": _named(e, finals), "n": s.params["n"],
                "dominated_by_expected": {"".join(k): axioms.dominates(e, dominator, _idx(e, k))
                                          for k in verdicts},
                "pareto_holds": {"".join(k): vd.holds for k, vd in verdicts.items()}}
    ok = (computed["finals"] == sorted(s.expectation["finals"])
          and all(computed["dominated_by_expected"].values())
          and not any(vd.holds for vd in verdicts.values()))
    return ok, computed


def verify(s: Scenario) -> TheoremReport:
    """Run the scenario's rule and checker; a mismatch is ``passed=False``."""
    runner = RuleRunner.of(s.rule)
    if s.id.startswith("T2"):
        ok, computed = _verify_t2(s, runner)
    elif s.id in ("T3", "A_CM_1", "A_CM_2"):
        ok, computed = _verify_cm(s, runner)
    elif s.id.startswith("T4") or s.id.startswith("A_CONS"):
        ok, computed = _verify_cons(s, runner)
    elif s.id.startswith("A_LEM1"):
        ok, computed = _verify_lemma(s, runner)
    elif s.id == "A_PE":
        ok, computed = _verify_pe(s, runner)
    else:
        raise VotingError(f"unknown scenario {s.id!r}")
    computed = dict(computed, rule=str(runner), vectors={k: v.sizes for k, v in s.vectors.items()},
                    params=s.params)
    return TheoremReport(s.id, bool(ok), computed)


def verify_all(rules_by_id: dict) -> list:
    return [verify(build(sid, rule)) for sid, rule in rules_by_id.items()]


__all__ = [
    "BranchPreconditionError", "NoRatioFound", "Ratio", "Scenario", "SCENARIOS", "T2_GROUP5",
    "TheoremReport", "build", "derive_integer_ratio", "pareto_constraints", "verify", "verify_all",
]
