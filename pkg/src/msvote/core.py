"""Election data model, ballot algebra and the JSON election format.

Candidates are dense integer indices ``0..m-1``; labels only appear at the
I/O boundary. A committee is a sorted tuple of candidate indices, which makes
committees hashable and gives the lexicographic order used for resolute
tie-breaking for free.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Committee = tuple  # sorted tuple[int, ...]

DEFAULT_ENUM_CAP = 10**6
DEFAULT_FRONTIER_CAP = 10**5
DEFAULT_PERMUTATION_CAP = 8
ENUM_CAP_ENV = "MSVOTE_ENUM_CAP"


class VotingError(ValueError):
    """Base class for invalid inputs to any rule engine."""


class ElectionFormatError(VotingError):
    pass


class CapExceeded(VotingError):
    """An exact enumeration would exceed the configured cap."""

    def __init__(self, what: str, size: int, cap: int, m: int | None = None, k: int | None = None):
        self.what = what
        self.size = size
        self.cap = cap
        self.m = m
        self.k = k
        where = f" at (m={m}, k={k})" if m is not None else ""
        super().__init__(f"{what} of size {size} exceeds cap {cap}{where}; use a smaller instance")


def enum_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get(ENUM_CAP_ENV, DEFAULT_ENUM_CAP))


@dataclass(frozen=True)
class RankedBallot:
    ranking: tuple
    weight: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(self.ranking))
        if len(set(self.ranking)) != len(self.ranking):
            raise ElectionFormatError(f"non-permutation ranking {self.ranking}")
        if not isinstance(self.weight, int) or self.weight < 1:
            raise ElectionFormatError(f"ballot weight must be a positive integer, got {self.weight!r}")

    def position(self, c: int) -> int:
        """1-based position of ``c`` in this ballot."""
        return self.ranking.index(c) + 1


@dataclass(frozen=True)
class ApprovalBallot:
    approved: frozenset
    weight: int = 1

    def __post_init__(self):
        object.__setattr__(self, "approved", frozenset(self.approved))
        if not self.approved:
            raise ElectionFormatError("approval ballot must approve at least one candidate")
        if not isinstance(self.weight, int) or self.weight < 1:
            raise ElectionFormatError(f"ballot weight must be a positive integer, got {self.weight!r}")


Ballot = Union[RankedBallot, ApprovalBallot]


@dataclass(frozen=True)
class Election:
    """A candidate set plus a homogeneous list of weighted ballots."""

    candidates: tuple
    ballots: tuple

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "ballots", tuple(self.ballots))
        if len(set(self.candidates)) != len(self.candidates):
            raise ElectionFormatError("duplicate candidate labels")
        kinds = {type(b) for b in self.ballots}
        if len(kinds) > 1:
            raise ElectionFormatError("mixed ranked and approval ballots")
        m = len(self.candidates)
        full = set(range(m))
        for b in self.ballots:
            if isinstance(b, RankedBallot):
                if set(b.ranking) != full or len(b.ranking) != m:
                    raise ElectionFormatError(f"non-permutation ranking {b.ranking} over {m} candidates")
            elif isinstance(b, ApprovalBallot):
                if not b.approved <= full:
                    raise ElectionFormatError(f"unknown candidate in approval ballot {sorted(b.approved)}")
            else:
                raise ElectionFormatError(f"not a ballot: {b!r}")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return sum(b.weight for b in self.ballots)

    @property
    def is_ranked(self) -> bool:
        return not self.ballots or isinstance(self.ballots[0], RankedBallot)

    @property
    def is_approval(self) -> bool:
        return not self.ballots or isinstance(self.ballots[0], ApprovalBallot)

    def index(self, label: str) -> int:
        try:
            return self.candidates.index(label)
        except ValueError:
            raise VotingError(f"unknown candidate {label!r}") from None

    def labels(self, committee: Iterable[int]) -> list:
        return [self.candidates[c] for c in sorted(committee)]

    def with_ballots(self, ballots: Iterable[Ballot]) -> "Election":
        return Election(self.candidates, tuple(ballots))

    def __add__(self, other: "Election") -> "Election":
        """Union of two voter groups over the same candidate set."""
        if self.candidates != other.candidates:
            raise VotingError("cannot unite elections over different candidate sets")
        return Election(self.candidates, self.ballots + other.ballots)

    def scaled(self, factor: int) -> "Election":
        return self.with_ballots(type(b)(_payload(b), b.weight * factor) for b in self.ballots)


def _payload(b: Ballot):
    return b.ranking if isinstance(b, RankedBallot) else b.approved


def ranked_election(labels: Sequence[str], groups: Iterable[tuple]) -> Election:
    """Build a ranked election from ``(weight, [label, ...])`` pairs."""
    idx = {lab: i for i, lab in enumerate(labels)}
    ballots = []
    for weight, order in groups:
        try:
            ballots.append(RankedBallot(tuple(idx[x] for x in order), weight))
        except KeyError as exc:
            raise VotingError(f"unknown candidate {exc.args[0]!r}") from None
    return Election(tuple(labels), tuple(ballots))


def approval_election(labels: Sequence[str], groups: Iterable[tuple]) -> Election:
    """Build an approval election from ``(weight, {label, ...})`` pairs."""
    idx = {lab: i for i, lab in enumerate(labels)}
    ballots = []
    for weight, approved in groups:
        try:
            ballots.append(ApprovalBallot(frozenset(idx[x] for x in approved), weight))
        except KeyError as exc:
            raise VotingError(f"unknown candidate {exc.args[0]!r}") from None
    return Election(tuple(labels), tuple(ballots))


def committee(members: Iterable[int]) -> Committee:
    return tuple(sorted(set(members)))


@dataclass(frozen=True)
class StageVector:
    """Committee sizes ``(k_1, ..., k_t)``.

    Strict mode requires ``m > k_1 > ... > k_t >= 1``. Relaxed mode also
    accepts ``k_1 = m`` and adjacent equal sizes; such stages are identities.
    """

    sizes: tuple
    relaxed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(k) for k in self.sizes))
        if not self.sizes:
            raise VotingError("stage vector needs at least one stage")
        if self.sizes[-1] < 1:
            raise VotingError(f"committee sizes must be >= 1: {self.sizes}")
        for a, b in zip(self.sizes, self.sizes[1:]):
            if a < b or (a == b and not self.relaxed):
                raise VotingError(f"stage sizes must be strictly decreasing: {self.sizes}")

    @classmethod
    def parse(cls, text: str, relaxed: bool = False) -> "StageVector":
        try:
            return cls(tuple(int(x) for x in text.split(",") if x.strip()), relaxed)
        except ValueError:
            raise VotingError(f"bad stage vector {text!r}") from None

    @classmethod
    def of(cls, v) -> "StageVector":
        if isinstance(v, StageVector):
            return v
        if isinstance(v, int):
            return cls((v,))
        return cls(tuple(v))

    @property
    def t(self) -> int:
        return len(self.sizes)

    @property
    def last(self) -> int:
        return self.sizes[-1]

    def validate(self, m: int) -> None:
        first = self.sizes[0]
        if first > m or (first == m and not self.relaxed):
            raise VotingError(f"first stage size {first} must be below m={m}")

    def __str__(self):
        return ",".join(map(str, self.sizes))


# ballot algebra

def restrict_ballot(b: RankedBallot, subset: Iterable[int]) -> RankedBallot:
    """Ranking of ``b`` on ``subset``, keeping relative order."""
    subset = set(subset)
    if not subset:
        raise VotingError("cannot restrict a ballot to an empty subset")
    unknown = subset - set(b.ranking)
    if unknown:
        raise VotingError(f"unknown candidate(s) {sorted(unknown)} in restriction subset")
    return RankedBallot(tuple(c for c in b.ranking if c in subset), b.weight)


def restricted_profile(e: Election, pool: Iterable[int]) -> list:
    """Distinct rankings of ``e`` restricted to ``pool`` with merged weights.

    Always recomputed from the original ballots, so restriction composes
    exactly as order preservation demands.
    """
    pool = frozenset(pool)
    merged = Counter()
    for b in e.ballots:
        merged[tuple(c for c in b.ranking if c in pool)] += b.weight
    return sorted(merged.items())


def cycle(s: Sequence, i: int) -> tuple:
    """Rotation ``s'_j = s_{j+i}`` (1-based, wrapping); ``i = len(s)`` is the identity."""
    m = len(s)
    if not 1 <= i <= m:
        raise VotingError(f"cycle index {i} out of range [1, {m}]")
    s = tuple(s)
    return s[i:] + s[:i]


def all_permutations(s: Sequence, cap: int = DEFAULT_PERMUTATION_CAP) -> list:
    if len(s) > cap:
        raise CapExceeded("permutation set", math.factorial(len(s)), math.factorial(cap))
    return list(itertools.permutations(tuple(s)))


def cycles(s: Sequence) -> list:
    """All rotations ``rho_i(s)`` for ``i = 1..len(s)``."""
    return [cycle(s, i) for i in range(1, len(s) + 1)]


def first_place_count(e: Election, c: int) -> int:
    if not e.is_ranked:
        raise VotingError("first-place counts need a ranked profile")
    if not 0 <= c < e.m:
        raise VotingError(f"unknown candidate {c}")
    return sum(b.weight for b in e.ballots if b.ranking[0] == c)


def quota(n: int, k: int, ceiling: bool = False) -> Fraction:
    """The ``n/k`` threshold, exact or rounded up."""
    q = Fraction(n, k)
    return Fraction(math.ceil(q)) if ceiling else q


# JSON election files

def election_to_dict(e: Election) -> dict:
    ballots = []
    for b in e.ballots:
        if isinstance(b, RankedBallot):
            ballots.append({"ranking": [e.candidates[c] for c in b.ranking], "weight": b.weight})
        else:
            ballots.append({"approvals": [e.candidates[c] for c in sorted(b.approved)], "weight": b.weight})
    return {"candidates": list(e.candidates), "ballots": ballots}


def serialize_election(e: Election) -> str:
    lines = ['{"candidates": ' + json.dumps(list(e.candidates)) + ',', ' "ballots": [']
    rows = [" " + json.dumps(b) for b in election_to_dict(e)["ballots"]]
    lines.append(",\n".join(rows))
    lines.append(" ]}")
    return "\n".join(line for line in lines if line) + "\n"


def election_from_dict(doc: dict) -> Election:
    if not isinstance(doc, dict) or "candidates" not in doc or "ballots" not in doc:
        raise ElectionFormatError("election document needs 'candidates' and 'ballots'")
    labels = doc["candidates"]
    if not all(isinstance(x, str) for x in labels):
        raise ElectionFormatError("candidate labels must be strings")
    if len(set(labels)) != len(labels):
        raise ElectionFormatError("duplicate candidate labels")
    idx = {lab: i for i, lab in enumerate(labels)}

    def lookup(lab):
        if lab not in idx:
            raise ElectionFormatError(f"unknown candidate {lab!r}")
        return idx[lab]

    ballots = []
    for raw in doc["ballots"]:
        weight = raw.get("weight", 1)
        if isinstance(weight, bool) or not isinstance(weight, int) or weight < 1:
            raise ElectionFormatError(f"zero or invalid weight {weight!r}")
        if ("ranking" in raw) == ("approvals" in raw):
            raise ElectionFormatError("each ballot needs exactly one of 'ranking' or 'approvals'")
        if "ranking" in raw:
            order = [lookup(x) for x in raw["ranking"]]
            if len(set(order)) != len(order) or len(order) != len(labels):
                raise ElectionFormatError(f"non-permutation ranking {raw['ranking']}")
            ballots.append(RankedBallot(tuple(order), weight))
        else:
            ballots.append(ApprovalBallot(frozenset(lookup(x) for x in raw["approvals"]), weight))
    return Election(tuple(labels), tuple(ballots))


def parse_election(text: str) -> Election:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ElectionFormatError(f"malformed JSON: {exc}") from None
    return election_from_dict(doc)


def load_election(path) -> Election:
    with open(path) as fh:
        return parse_election(fh.read())
