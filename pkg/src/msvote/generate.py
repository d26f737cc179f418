"""Random election generators (deterministic per seed)."""

from __future__ import annotations

import random
import string

from .core import ApprovalBallot, Election, RankedBallot, VotingError


def default_labels(m: int) -> tuple:
    if m <= 26:
        return tuple(string.ascii_lowercase[:m])
    return tuple(f"c{i}" for i in range(m))


def random_ranked(rng: random.Random, m: int, n: int, labels=None) -> Election:
    """``n`` unit-weight ballots, each a uniform random permutation."""
    if m < 1 or n < 0:
        raise VotingError(f"invalid ranked-uniform parameters m={m}, n={n}")
    ballots = []
    for _ in range(n):
        order = list(range(m))
        rng.shuffle(order)
        ballots.append(RankedBallot(tuple(order)))
    return Election(labels or default_labels(m), tuple(ballots))


def random_approval(rng: random.Random, m: int, n: int, p: float = 0.5, labels=None) -> Election:
    """Each voter approves each candidate independently with probability ``p``.

    An empty draw is replaced by a single uniformly chosen approval, since
    ballots must approve someone.
    """
    if m < 1 or n < 0 or not 0 < p <= 1:
        raise VotingError(f"invalid approval-uniform parameters m={m}, n={n}, p={p}")
    ballots = []
    for _ in range(n):
        approved = {c for c in range(m) if rng.random() < p}
        if not approved:
            approved = {rng.randrange(m)}
        ballots.append(ApprovalBallot(frozenset(approved)))
    return Election(labels or default_labels(m), tuple(ballots))


def random_vector(rng: random.Random, m: int, t: int, last: int | None = None):
    """A strict vector ``m > k_1 > ... > k_t``; None if none exists."""
    if last is None:
        if m - 1 < t:
            return None
        return tuple(sorted(rng.sample(range(1, m), t), reverse=True))
    room = range(last + 1, m)
    if not 1 <= last < m or len(room) < t - 1:
        return None
    return tuple(sorted(rng.sample(room, t - 1), reverse=True)) + (last,)
