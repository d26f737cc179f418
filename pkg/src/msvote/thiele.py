"""Approval-based omega-Thiele rules and their multi-stage composition."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import CapExceeded, Election, VotingError, committee, enum_cap
from .multistage import run_multistage
from .score_rules import WinnerSet


@dataclass(eq=False)
class OmegaFunction:
    """Nondecreasing satisfaction ``omega(x)`` with ``omega(0) = 0``.

    ``fn`` is a closed form; otherwise ``values`` lists ``omega(0..len-1)``
    and larger arguments are undefined.
    """

    name: str
    fn: Callable | None = None
    values: tuple = ()
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.fn is None:
            self.values = tuple(Fraction(x) for x in self.values)
            if not self.values or self.values[0] != 0:
                raise VotingError(f"omega {self.name!r} must start with omega(0) = 0")
            if any(a > b for a, b in zip(self.values, self.values[1:])):
                raise VotingError(f"omega {self.name!r} must be nondecreasing")

    def __call__(self, x: int) -> Fraction:
        if x not in self._memo:
            if self.fn is not None:
                self._memo[x] = Fraction(self.fn(x))
            elif x < len(self.values):
                self._memo[x] = self.values[x]
            else:
                raise VotingError(f"omega {self.name!r} undefined at {x}")
        return self._memo[x]

    def increment(self, i: int) -> Fraction:
        """``omega(i) - omega(i - 1)`` for ``i >= 1``."""
        return self(i) - self(i - 1)

    @property
    def max_arg(self) -> float:
        return math.inf if self.fn is not None else len(self.values) - 1


def _harmonic(x: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, x + 1)), Fraction(0))


AV = OmegaFunction("av", fn=lambda x: x)
PAV = OmegaFunction("pav", fn=_harmonic)
ACC = OmegaFunction("acc", fn=lambda x: min(1, x))

OMEGA_PRESETS = {"av": AV, "pav": PAV, "acc": ACC}


def load_omega_table(path) -> OmegaFunction:
    """Read ``{"name": str, "values": ["0", "1", ...]}``."""
    with open(path) as fh:
        doc = json.load(fh)
    return OmegaFunction(doc.get("name", str(path)), values=tuple(doc["values"]))


@dataclass(frozen=True)
class ThieleRule:
    omega: OmegaFunction

    def __str__(self):
        return f"thiele:{self.omega.name}"

    def stage_winners(self, e: Election, pool, k: int, cap: int | None = None) -> WinnerSet:
        return _pool_winners(self.omega, e, pool, k, cap)

    def stage_lexmin(self, e: Election, pool, k: int, cap: int | None = None) -> tuple:
        return _pool_winners(self.omega, e, pool, k, cap).committees[0]


def _require_approval(e: Election) -> None:
    if not e.is_approval:
        raise VotingError("Thiele rules need approval ballots")


def thiele_score(omega: OmegaFunction, profile: Election, S) -> Fraction:
    _require_approval(profile)
    S = frozenset(S)
    return sum((b.weight * omega(len(S & b.approved)) for b in profile.ballots), Fraction(0))


def _pool_winners(omega, e, pool, k, cap=None) -> WinnerSet:
    _require_approval(e)
    pool = tuple(sorted(pool))
    count = math.comb(len(pool), k)
    limit = enum_cap(cap)
    if count > limit:
        raise CapExceeded("committee enumeration", count, limit, m=len(pool), k=k)
    # bit masks keep the inner loop to one popcount per ballot
    merged = {}
    for b in e.ballots:
        mask = sum(1 << c for c in b.approved if c in pool)
        merged[mask] = merged.get(mask, 0) + b.weight
    rows = sorted(merged.items())
    table = [omega(x) for x in range(k + 1)]
    best, winners = None, []
    for S in itertools.combinations(pool, k):
        smask = sum(1 << c for c in S)
        score = sum(w * table[(mask & smask).bit_count()] for mask, w in rows)
        if best is None or score > best:
            best, winners = score, [S]
        elif score == best:
            winners.append(S)
    return WinnerSet(tuple(winners), Fraction(best))


def thiele_winners(omega: OmegaFunction, profile: Election, k: int, cap: int | None = None) -> WinnerSet:
    if not 1 <= k < profile.m:
        raise VotingError(f"committee size k={k} must satisfy 1 <= k < m={profile.m}")
    return _pool_winners(omega, profile, range(profile.m), k, cap)


def run_multistage_thiele(omega: OmegaFunction, profile: Election, v, **kwargs):
    """Same omega and the same (unrestricted) approval ballots at every stage."""
    _require_approval(profile)
    return run_multistage(ThieleRule(omega), profile, v, **kwargs)


def is_linear_omega(omega: OmegaFunction, upto: int) -> bool:
    if upto < 2:
        raise VotingError("linearity check needs upto >= 2")
    first = omega.increment(1)
    return all(omega.increment(i) == first for i in range(2, upto + 1))


def first_nonlinear_index(omega: OmegaFunction, upto: int = 64):
    """Smallest ``i >= 2`` with ``omega(i) - omega(i-1) != omega(1)``, or None."""
    first = omega.increment(1)
    top = int(min(upto, omega.max_arg))
    for i in range(2, top + 1):
        if omega.increment(i) != first:
            return i
    return None
